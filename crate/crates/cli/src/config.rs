use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bisqueeze::deformations::ModelSpec;
use serde::{Deserialize, Serialize};

pub const DEFAULT_DIM: usize = 64;

/// Run configuration. Unknown keys anywhere are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_dim() -> usize {
    DEFAULT_DIM
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtentPolicy {
    /// Trapezoid half-width `1.6 sqrt((2 n_max + 1) / cos 2nu)`.
    ScaledHermite,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nodes: usize,
    #[serde(default = "default_extent")]
    pub extent: ExtentPolicy,
}

fn default_extent() -> ExtentPolicy {
    ExtentPolicy::ScaledHermite
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "tol_biorthogonality")]
    pub biorthogonality: f64,
    #[serde(default = "tol_ladder")]
    pub ladder: f64,
    #[serde(default = "tol_states")]
    pub states: f64,
    /// Relative radius match.
    #[serde(default = "tol_radius")]
    pub radius: f64,
    #[serde(default = "tol_dynamics")]
    pub dynamics: f64,
    #[serde(default = "tol_identification")]
    pub identification: f64,
    #[serde(default = "tol_identity")]
    pub identity: f64,
}

fn tol_biorthogonality() -> f64 {
    1e-8
}
fn tol_ladder() -> f64 {
    1e-9
}
fn tol_states() -> f64 {
    1e-7
}
fn tol_radius() -> f64 {
    0.02
}
fn tol_dynamics() -> f64 {
    1e-8
}
fn tol_identification() -> f64 {
    1e-7
}
fn tol_identity() -> f64 {
    1e-5
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            biorthogonality: tol_biorthogonality(),
            ladder: tol_ladder(),
            states: tol_states(),
            radius: tol_radius(),
            dynamics: tol_dynamics(),
            identification: tol_identification(),
            identity: tol_identity(),
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("biorthogonality", self.biorthogonality),
            ("ladder", self.ladder),
            ("states", self.states),
            ("radius", self.radius),
            ("dynamics", self.dynamics),
            ("identification", self.identification),
            ("identity", self.identity),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("tolerance '{name}' must be positive and finite, got {v}");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Biorthogonality and ladder relations for `n < nmax`.
    Validate {
        #[serde(default = "default_nmax")]
        nmax: usize,
    },
    /// Bi-squeezed pair at `z = r e^{i theta}`, plus the coherent variant for
    /// regular models.
    States {
        r: f64,
        #[serde(default)]
        theta: f64,
        #[serde(default = "default_alpha")]
        alpha: [f64; 2],
    },
    Radius {},
    Dynamics {
        lambda: f64,
        #[serde(default)]
        omega: f64,
        #[serde(default = "default_times")]
        times: Vec<f64>,
        #[serde(default = "default_ode_tol")]
        ode_tol: f64,
        /// Coupling used by the squeeze identification; defaults to `lambda`.
        #[serde(default)]
        identification_lambda: Option<f64>,
    },
    /// Phase-space resolution of the identity over bi-squeezed coherent pairs.
    Identity {
        #[serde(default)]
        r: f64,
        #[serde(default)]
        theta: f64,
        #[serde(default = "default_cutoff")]
        cutoff_radius: f64,
        #[serde(default = "default_radial")]
        radial_order: usize,
        #[serde(default = "default_angular")]
        angular_order: usize,
    },
}

fn default_nmax() -> usize {
    16
}
fn default_alpha() -> [f64; 2] {
    [0.5, 0.0]
}
fn default_times() -> Vec<f64> {
    (0..20).map(|k| 2.0 * k as f64 / 19.0).collect()
}
fn default_ode_tol() -> f64 {
    1e-9
}
fn default_cutoff() -> f64 {
    6.0
}
fn default_radial() -> usize {
    80
}
fn default_angular() -> usize {
    64
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TaskSpec::Validate { .. } => "validate",
            TaskSpec::States { .. } => "states",
            TaskSpec::Radius {} => "radius",
            TaskSpec::Dynamics { .. } => "dynamics",
            TaskSpec::Identity { .. } => "identity",
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            bail!("dim must be at least 2, got {}", self.dim);
        }
        if self.tasks.is_empty() {
            bail!("config lists no tasks");
        }
        if let Some(g) = &self.grid {
            if g.nodes < 16 {
                bail!("grid.nodes must be at least 16, got {}", g.nodes);
            }
        }
        self.tolerances.validate()
    }

    /// Model spec with the config-level grid applied.
    pub fn model_spec(&self) -> ModelSpec {
        match (&self.model, &self.grid) {
            (ModelSpec::Swanson { nu, n_max, .. }, Some(g)) => {
                ModelSpec::Swanson { nu: *nu, n_max: *n_max, grid_nodes: Some(g.nodes) }
            }
            (m, _) => m.clone(),
        }
    }

    /// Sets a scalar parameter; returns `false` when nothing in the config
    /// carries it.
    pub fn set_axis(&mut self, axis: &str, value: f64) -> bool {
        let mut hit = false;
        if axis == "nu" {
            if let ModelSpec::Swanson { nu, .. } = &mut self.model {
                *nu = value;
                hit = true;
            }
        }
        for task in &mut self.tasks {
            match (axis, task) {
                ("r", TaskSpec::States { r, .. } | TaskSpec::Identity { r, .. })
                | ("theta", TaskSpec::States { theta: r, .. } | TaskSpec::Identity { theta: r, .. })
                | ("lambda", TaskSpec::Dynamics { lambda: r, .. })
                | ("omega", TaskSpec::Dynamics { omega: r, .. }) => {
                    *r = value;
                    hit = true;
                }
                ("t", TaskSpec::Dynamics { times, .. }) => {
                    *times = vec![value];
                    hit = true;
                }
                _ => {}
            }
        }
        hit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"model": {"name": "identity"}, "tasks": [{"task": "validate"}]}"#).unwrap();
        assert_eq!(cfg.dim, 64);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert_eq!(cfg.tasks[0], TaskSpec::Validate { nmax: 16 });
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for bad in [
            r#"{"model": {"name": "identity"}, "tasks": [], "tolerence": {}}"#,
            r#"{"model": {"name": "identity"}, "tasks": [], "tolerances": {"ladders": 1e-9}}"#,
            r#"{"model": {"name": "identity", "nu": 0.3}, "tasks": []}"#,
            r#"{"model": {"name": "identity"}, "tasks": [{"task": "radius", "nu": 0.3}]}"#,
            r#"{"model": {"name": "identity"}, "tasks": [{"task": "spectrum"}]}"#,
        ] {
            assert!(serde_json::from_str::<RunConfig>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn axes_hit_the_right_fields() {
        let mut cfg: RunConfig = serde_json::from_str(
            r#"{"model": {"name": "swanson", "nu": 0.3}, "tasks": [{"task": "radius"}, {"task": "dynamics", "lambda": 0.1}]}"#,
        )
        .unwrap();
        assert!(cfg.set_axis("nu", 0.5));
        assert!(cfg.set_axis("t", 1.5));
        assert!(!cfg.set_axis("r", 0.2));
        assert!(matches!(cfg.model, ModelSpec::Swanson { nu, .. } if nu == 0.5));
        assert!(matches!(&cfg.tasks[1], TaskSpec::Dynamics { times, .. } if times == &vec![1.5]));
    }

    #[test]
    fn non_positive_tolerance_is_rejected() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"model": {"name": "identity"}, "tasks": [{"task": "radius"}], "tolerances": {"ladder": 0}}"#,
        )
        .unwrap();
        assert!(cfg.validate().is_err());
    }
}

//! Run configuration: optional JSON config file merged under command-line
//! flags (flags win).

use std::path::Path;

use anyhow::Context;
use gsr_core::pitch::PitchDimensions;
use gsr_core::post::{MergeConfig, TeamConfig};
use gsr_core::track::TrackerConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub pitch_length: Option<f64>,
    pub pitch_width: Option<f64>,
    pub gamma: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub tracker: TrackerSection,
    #[serde(default)]
    pub merge: MergeSection,
    #[serde(default)]
    pub team: TeamSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackerSection {
    pub lambda_appearance: Option<f64>,
    pub gating_mahalanobis: Option<f64>,
    pub iou_gate: Option<f64>,
    pub max_age: Option<usize>,
    pub n_init: Option<usize>,
    pub ema_alpha: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergeSection {
    pub cosine_min: Option<f64>,
    pub max_gap: Option<usize>,
    pub require_jersey_consistency: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeamSection {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub pitch_weight: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn pitch_dimensions(
        &self,
        length_flag: Option<f64>,
        width_flag: Option<f64>,
    ) -> anyhow::Result<PitchDimensions> {
        let mut dims = PitchDimensions::default();
        if let Some(l) = length_flag.or(self.pitch_length) {
            dims.length = l;
        }
        if let Some(w) = width_flag.or(self.pitch_width) {
            dims.width = w;
        }
        dims.validate().map_err(anyhow::Error::from)?;
        Ok(dims)
    }

    pub fn tracker_config(&self) -> TrackerConfig {
        let mut cfg = TrackerConfig::default();
        let s = &self.tracker;
        if let Some(v) = s.lambda_appearance {
            cfg.lambda_appearance = v;
        }
        if let Some(v) = s.gating_mahalanobis {
            cfg.gating_mahalanobis = v;
        }
        if let Some(v) = s.iou_gate {
            cfg.iou_gate = v;
        }
        if let Some(v) = s.max_age {
            cfg.max_age = v;
        }
        if let Some(v) = s.n_init {
            cfg.n_init = v;
        }
        if let Some(v) = s.ema_alpha {
            cfg.ema_alpha = v;
        }
        cfg
    }

    pub fn merge_config(&self) -> MergeConfig {
        let mut cfg = MergeConfig::default();
        if let Some(v) = self.merge.cosine_min {
            cfg.cosine_min = v;
        }
        if let Some(v) = self.merge.max_gap {
            cfg.max_gap = v;
        }
        if let Some(v) = self.merge.require_jersey_consistency {
            cfg.require_jersey_consistency = v;
        }
        cfg
    }

    pub fn team_config(&self, seed_flag: Option<u64>) -> TeamConfig {
        let mut cfg = TeamConfig::default();
        if let Some(v) = seed_flag.or(self.team.seed).or(self.seed) {
            cfg.seed = v;
        }
        if let Some(v) = self.team.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.team.pitch_weight {
            cfg.pitch_weight = v;
        }
        cfg
    }

    pub fn gammas(&self, flag: Option<Vec<f64>>) -> Vec<f64> {
        let mut gammas = flag
            .or_else(|| self.gamma.clone())
            .unwrap_or_else(|| vec![5.0, 10.0, 20.0]);
        gammas.retain(|g| *g > 0.0);
        if gammas.is_empty() {
            gammas = vec![5.0, 10.0, 20.0];
        }
        gammas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        gammas
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aui::{Layout, Provenance, ScoreWeights};
use crate::sequence::{extract_lrs_weighted, LrsSet};

use super::EngineError;

pub const STORE_VERSION: u32 = 1;

/// Everything learned for one user on one model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub sequences: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lrs: Option<LrsSet>,
    #[serde(default)]
    pub adaptations: Vec<AdaptationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights_last_used: Option<ScoreWeights>,
    /// Fingerprints of declined layouts.
    #[serde(default)]
    pub declined: Vec<String>,
}

/// An adopted layout with its optional rating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptationRecord {
    pub layout: Layout,
    pub names: Vec<Vec<String>>,
    pub fingerprint: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<u8>,
    pub timestamp: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub xml: String,
    #[serde(default)]
    pub profiles: BTreeMap<String, Profile>,
}

/// Persistent learning state: models, per-user profiles, and group membership.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Store {
    pub version: u32,
    #[serde(default)]
    pub models: BTreeMap<String, ModelEntry>,
    #[serde(default)]
    pub groups: BTreeMap<String, BTreeSet<String>>,
}

impl Default for Store {
    fn default() -> Self {
        Self {
            version: STORE_VERSION,
            models: BTreeMap::new(),
            groups: BTreeMap::new(),
        }
    }
}

impl Store {
    /// Reads a store; a missing file is an empty store.
    pub fn load(path: &Path) -> Result<Self, EngineError> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Self::default()),
            Err(e) => return Err(EngineError::Store(format!("{}: {e}", path.display()))),
        };
        let store: Store = serde_json::from_str(&text)
            .map_err(|e| EngineError::Store(format!("{}: {e}", path.display())))?;
        if store.version != STORE_VERSION {
            return Err(EngineError::Store(format!(
                "{}: unsupported store version {}",
                path.display(),
                store.version
            )));
        }
        Ok(store)
    }

    /// Writes the store atomically: a temporary file in the same directory is renamed over
    /// the target.
    pub fn save(&self, path: &Path) -> Result<(), EngineError> {
        let err =
            |e: &dyn std::fmt::Display| EngineError::Store(format!("{}: {e}", path.display()));
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        std::fs::create_dir_all(dir).map_err(|e| err(&e))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| err(&e))?;
        serde_json::to_writer_pretty(&mut tmp, self).map_err(|e| err(&e))?;
        tmp.write_all(b"\n").map_err(|e| err(&e))?;
        tmp.as_file().sync_all().map_err(|e| err(&e))?;
        tmp.persist(path).map_err(|e| err(&e.error))?;
        Ok(())
    }

    pub fn profile(&self, model: &str, user: &str) -> Option<&Profile> {
        self.models.get(model)?.profiles.get(user)
    }

    pub fn profile_mut(&mut self, model: &str, user: &str) -> Option<&mut Profile> {
        Some(
            self.models
                .get_mut(model)?
                .profiles
                .entry(user.to_string())
                .or_default(),
        )
    }

    pub fn join_group(&mut self, group: &str, user: &str) {
        self.groups
            .entry(group.to_string())
            .or_default()
            .insert(user.to_string());
    }

    /// Other members of `group`.
    pub fn peers(&self, group: &str, user: &str) -> Vec<String> {
        self.groups
            .get(group)
            .map(|m| m.iter().filter(|u| *u != user).cloned().collect())
            .unwrap_or_default()
    }

    /// The user's sequences at weight 1 followed by the group peers' at `group_weight`.
    pub fn blended_log(
        &self,
        model: &str,
        user: &str,
        group: Option<&str>,
        group_weight: f64,
    ) -> Vec<(Vec<String>, f64)> {
        let mut out: Vec<(Vec<String>, f64)> = self
            .profile(model, user)
            .map(|p| p.sequences.iter().map(|s| (s.clone(), 1.0)).collect())
            .unwrap_or_default();
        if let Some(group) = group {
            if group_weight > 0.0 {
                for peer in self.peers(group, user) {
                    if let Some(p) = self.profile(model, &peer) {
                        out.extend(p.sequences.iter().map(|s| (s.clone(), group_weight)));
                    }
                }
            }
        }
        out
    }

    /// Appends a sequence to the user's log and refreshes the stored LRS.
    pub fn record_sequence(
        &mut self,
        model: &str,
        user: &str,
        sequence: Vec<String>,
        threshold: u32,
    ) -> Result<(), EngineError> {
        let profile = self
            .profile_mut(model, user)
            .ok_or_else(|| EngineError::UnknownModel(model.to_string()))?;
        profile.sequences.push(sequence);
        let weighted: Vec<(&[String], f64)> = profile
            .sequences
            .iter()
            .map(|s| (s.as_slice(), 1.0))
            .collect();
        let mut lrs = extract_lrs_weighted(&weighted, threshold)?;
        lrs.owner = user.to_string();
        profile.lrs = Some(lrs);
        Ok(())
    }
}

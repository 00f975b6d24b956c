//! Session orchestration: monitoring, adaptation proposals, feedback and the persistent store.

mod store;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action_set::{ActionId, ActionSet};
use crate::aui::{
    k_best_search, reify_to_fui, AbstractUI, AuiError, FuiDocument, FuiPanel, Layout, Provenance,
    Reification, ScoreBreakdown, ScoreWeights, ScoredAui, Scorer, SearchConfig, DEFAULT_CAPACITY,
};
use crate::dialog::{compute_enablement, is_session_complete, ActionMonitorList, Edit};
use crate::sequence::{extract_lrs_weighted, MarkovModel, SequenceError};
use crate::task_model::{parse_task_model, TaskModel, TaskModelError};

pub use store::{AdaptationRecord, ModelEntry, Profile, Store, STORE_VERSION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{0}` is already registered with a different definition")]
    ModelConflict(String),
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("action `{0}` is disabled")]
    ActionDisabled(String),
    #[error("the session is completed")]
    SessionCompleted,
    #[error("no pending proposals")]
    NoPendingProposals,
    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),
    #[error("invalid feedback: {0}")]
    InvalidFeedback(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("store: {0}")]
    Store(String),
    #[error(transparent)]
    TaskModel(#[from] TaskModelError),
    #[error(transparent)]
    Aui(#[from] AuiError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

impl EngineError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnknownModel(_) => "unknown_model",
            Self::ModelConflict(_) => "model_conflict",
            Self::UnknownSession(_) => "unknown_session",
            Self::ActionDisabled(_) => "action_disabled",
            Self::SessionCompleted => "session_completed",
            Self::NoPendingProposals => "no_pending_proposals",
            Self::UnknownAlternative(_) => "unknown_alternative",
            Self::InvalidFeedback(_) => "invalid_feedback",
            Self::InvalidWeights(_) => "invalid_weights",
            Self::Store(_) => "store_error",
            Self::TaskModel(TaskModelError::UnknownAction(_)) => "unknown_action",
            Self::TaskModel(_) => "invalid_task_model",
            Self::Aui(_) => "aui_error",
            Self::Sequence(_) => "sequence_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub capacity: usize,
    /// Cap on the Markov order, which otherwise grows by one per logged session.
    pub max_order: usize,
    pub lrs_threshold: u32,
    pub search: SearchConfig,
    /// Where the store is persisted; `None` keeps it in memory.
    pub store_path: Option<PathBuf>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            capacity: DEFAULT_CAPACITY,
            max_order: 3,
            lrs_threshold: 1,
            search: SearchConfig::default(),
            store_path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Adaptation on explicit request within one session.
    Intra,
    /// Adaptation at the start of every session.
    Inter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Accept,
    Decline,
    Modify,
    Postpone,
    Reinitiate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackDecision {
    pub verb: Verb,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative_id: Option<String>,
}

impl FeedbackDecision {
    pub fn new(verb: Verb) -> Self {
        Self {
            verb,
            rating: None,
            alternative_id: None,
        }
    }

    pub fn rated(mut self, rating: u8) -> Self {
        self.rating = Some(rating);
        self
    }

    pub fn alternative(mut self, id: impl Into<String>) -> Self {
        self.alternative_id = Some(id.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub id: String,
    pub aui: AbstractUI,
    pub score: ScoreBreakdown,
    pub fingerprint: String,
    /// Number of leading containers kept from the layout it adapts.
    pub prefix_len: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProposalView {
    pub id: String,
    pub score: ScoreBreakdown,
    pub provenance: Provenance,
    pub fui_preview: FuiDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionOutcome {
    pub enablement: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fui_fragment: Option<FuiPanel>,
    pub current_panel: usize,
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupAlternative {
    pub owner: String,
    pub fingerprint: String,
    pub layout: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<u8>,
    pub timestamp: u64,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    model_id: String,
    model: Arc<TaskModel>,
    scenario: Scenario,
    user: String,
    group: Option<String>,
    weights: ScoreWeights,
    monitor: ActionMonitorList,
    current: AbstractUI,
    /// Layout in place before the last adoption, restored on decline if nothing happened since.
    previous: Option<AbstractUI>,
    current_panel: usize,
    iteration: u32,
    pending: Vec<Proposal>,
    markov: Option<MarkovModel>,
    completed: bool,
    logged: bool,
}

impl Session {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn model(&self) -> &TaskModel {
        &self.model
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn user(&self) -> &str {
        &self.user
    }

    pub fn weights(&self) -> &ScoreWeights {
        &self.weights
    }

    pub fn current_aui(&self) -> &AbstractUI {
        &self.current
    }

    pub fn current_panel(&self) -> usize {
        self.current_panel
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn pending(&self) -> &[Proposal] {
        &self.pending
    }

    pub fn markov(&self) -> Option<&MarkovModel> {
        self.markov.as_ref()
    }

    pub fn is_completed(&self) -> bool {
        self.completed
    }

    pub fn performed(&self) -> &[String] {
        self.monitor.ordered()
    }

    pub fn done(&self) -> ActionSet {
        self.monitor.done_set(&self.model)
    }

    /// Performed actions as ids, first occurrence only.
    fn history(&self) -> Vec<ActionId> {
        let mut out: Vec<ActionId> = Vec::new();
        for name in self.monitor.ordered() {
            if let Ok(a) = self.model.action_id(name) {
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
        out
    }

    pub fn fui(&self) -> FuiDocument {
        let enablement = compute_enablement(&self.model, &self.done());
        reify_to_fui(&self.current, &enablement, self.current_panel)
    }

    fn panel_settled(&self, index: usize, done: &ActionSet) -> bool {
        let enablement = compute_enablement(&self.model, done);
        self.current.layout.containers.get(index).is_some_and(|c| {
            c.iter().all(|&a| {
                done.contains(a) || !enablement.is_enabled(a) || self.model.is_optional(a)
            })
        })
    }
}

/// Owns the task models, the live sessions and the store.
#[derive(Debug)]
pub struct Engine {
    config: EngineConfig,
    store: Store,
    models: HashMap<String, Arc<TaskModel>>,
    sessions: BTreeMap<String, Session>,
    next_session: u64,
}

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    let out = out.trim_matches('-').to_string();
    if out.is_empty() {
        "model".to_string()
    } else {
        out
    }
}

impl Engine {
    /// Loads the store from `config.store_path` when set.
    pub fn new(config: EngineConfig) -> Result<Self, EngineError> {
        let store = match &config.store_path {
            Some(path) => Store::load(path)?,
            None => Store::default(),
        };
        Self::with_store(config, store)
    }

    pub fn with_store(config: EngineConfig, store: Store) -> Result<Self, EngineError> {
        if config.capacity == 0 {
            return Err(AuiError::ZeroCapacity.into());
        }
        if config.max_order == 0 {
            return Err(SequenceError::ZeroOrder.into());
        }
        let mut models = HashMap::new();
        for (id, entry) in &store.models {
            models.insert(id.clone(), Arc::new(parse_task_model(&entry.xml)?));
        }
        Ok(Self {
            config,
            store,
            models,
            sessions: BTreeMap::new(),
            next_session: 1,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    fn persist(&self) -> Result<(), EngineError> {
        match &self.config.store_path {
            Some(path) => self.store.save(path),
            None => Ok(()),
        }
    }

    /// Registers a model from its XML and returns its id, derived from the model name.
    /// Registering the same document again returns the same id.
    pub fn register_model(&mut self, xml: &str) -> Result<String, EngineError> {
        let model = parse_task_model(xml)?;
        let id = slug(model.name());
        if let Some(entry) = self.store.models.get(&id) {
            if entry.xml != xml {
                return Err(EngineError::ModelConflict(id));
            }
            return Ok(id);
        }
        self.store.models.insert(
            id.clone(),
            ModelEntry {
                xml: xml.to_string(),
                profiles: BTreeMap::new(),
            },
        );
        self.models.insert(id.clone(), Arc::new(model));
        self.persist()?;
        Ok(id)
    }

    pub fn model(&self, model_id: &str) -> Result<&TaskModel, EngineError> {
        self.models
            .get(model_id)
            .map(|m| m.as_ref())
            .ok_or_else(|| EngineError::UnknownModel(model_id.to_string()))
    }

    /// Appends logged sequences for a user, as if they had been monitored.
    pub fn import_sequences(
        &mut self,
        model_id: &str,
        user: &str,
        sequences: &[Vec<String>],
    ) -> Result<(), EngineError> {
        let model = self.model(model_id)?;
        for seq in sequences {
            model.ids(seq)?;
        }
        for seq in sequences {
            self.store
                .record_sequence(model_id, user, seq.clone(), self.config.lrs_threshold)?;
        }
        self.persist()
    }

    pub fn session(&self, session_id: &str) -> Result<&Session, EngineError> {
        self.sessions
            .get(session_id)
            .ok_or_else(|| EngineError::UnknownSession(session_id.to_string()))
    }

    fn session_mut(&mut self, session_id: &str) -> Result<&mut Session, EngineError> {
        self.sessions
            .get_mut(session_id)
            .ok_or_else(|| EngineError::UnknownSession(session_id.to_string()))
    }

    pub fn session_ids(&self) -> Vec<String> {
        self.sessions.keys().cloned().collect()
    }

    /// Opens a session. Inter sessions with logged behavior start on the best adapted layout;
    /// everything else starts on the depth-first initial layout.
    pub fn start_session(
        &mut self,
        model_id: &str,
        scenario: Scenario,
        user: &str,
        group: Option<&str>,
        weights: Option<ScoreWeights>,
    ) -> Result<(String, FuiDocument), EngineError> {
        let model = self
            .models
            .get(model_id)
            .cloned()
            .ok_or_else(|| EngineError::UnknownModel(model_id.to_string()))?;
        let weights = weights.unwrap_or_default();
        weights.validate().map_err(EngineError::InvalidWeights)?;
        if let Some(g) = group {
            self.store.join_group(g, user);
        }
        let profile = self
            .store
            .profile_mut(model_id, user)
            .ok_or_else(|| EngineError::UnknownModel(model_id.to_string()))?;
        profile.weights_last_used = Some(weights);

        let dfs = Layout::dfs_initial(&model, self.config.capacity);
        let id = format!("s{}", self.next_session);
        self.next_session += 1;
        let mut session = Session {
            id: id.clone(),
            model_id: model_id.to_string(),
            current: AbstractUI::from_layout(&model, &dfs, Provenance::Initial)?,
            model,
            scenario,
            user: user.to_string(),
            group: group.map(str::to_string),
            weights,
            monitor: ActionMonitorList::new(),
            previous: None,
            current_panel: 0,
            iteration: 0,
            pending: Vec::new(),
            markov: None,
            completed: false,
            logged: false,
        };
        session.markov = self.markov_for(&session)?;

        if scenario == Scenario::Inter && session.markov.is_some() {
            if let Some(reference) = self.last_adopted(&session) {
                session.current =
                    AbstractUI::from_layout(&session.model, &reference, Provenance::Initial)?;
            }
            let proposals = self.propose(&mut session)?;
            session.pending = proposals;
            self.adopt(&mut session, 0)?;
        }
        let fui = session.fui();
        self.sessions.insert(id.clone(), session);
        self.persist()?;
        Ok((id, fui))
    }

    pub fn fui(&self, session_id: &str) -> Result<FuiDocument, EngineError> {
        Ok(self.session(session_id)?.fui())
    }

    /// Records an add or remove of `action`. Adding a disabled action is rejected without
    /// any state change.
    pub fn handle_action(
        &mut self,
        session_id: &str,
        action: &str,
        edit: Edit,
    ) -> Result<ActionOutcome, EngineError> {
        let threshold = self.config.lrs_threshold;
        let session = self.session_mut(session_id)?;
        if session.completed {
            return Err(EngineError::SessionCompleted);
        }
        let model = session.model.clone();
        let a = model.action_id(action)?;
        let done = session.done();
        if edit == Edit::Add
            && !done.contains(a)
            && !compute_enablement(&model, &done).is_enabled(a)
        {
            return Err(EngineError::ActionDisabled(action.to_string()));
        }
        session.monitor.record_action(&model, action, edit)?;
        let done = session.done();

        let mut fragment = None;
        let panels = session.current.layout.containers.len();
        if session.panel_settled(session.current_panel, &done) && session.current_panel + 1 < panels
        {
            session.current_panel += 1;
            let fui = session.fui();
            fragment = fui.panels.into_iter().nth(session.current_panel);
        }

        let mut log = None;
        if is_session_complete(&model, &done) {
            session.completed = true;
            session.logged = true;
            let seq = session.monitor.ordered().to_vec();
            if let Some(m) = session.markov.as_mut() {
                m.update_online(&seq)?;
            }
            log = Some((session.model_id.clone(), session.user.clone(), seq));
        }
        let outcome = ActionOutcome {
            enablement: compute_enablement(&model, &done).to_map(&model),
            fui_fragment: fragment,
            current_panel: session.current_panel,
            completed: session.completed,
        };
        if let Some((model_id, user, seq)) = log {
            self.store
                .record_sequence(&model_id, &user, seq, threshold)?;
            self.persist()?;
        }
        Ok(outcome)
    }

    /// Computes up to `k` proposals for the part of the layout not yet in use. They stay
    /// pending until feedback.
    pub fn trigger_adaptation(&mut self, session_id: &str) -> Result<Vec<Proposal>, EngineError> {
        let mut session = self
            .sessions
            .remove(session_id)
            .ok_or_else(|| EngineError::UnknownSession(session_id.to_string()))?;
        let result = if session.completed {
            Err(EngineError::SessionCompleted)
        } else {
            self.propose(&mut session)
        };
        if let Ok(proposals) = &result {
            session.pending = proposals.clone();
        }
        self.sessions.insert(session_id.to_string(), session);
        result
    }

    pub fn proposal_views(&self, session_id: &str) -> Result<Vec<ProposalView>, EngineError> {
        let session = self.session(session_id)?;
        let enablement = compute_enablement(&session.model, &session.done());
        Ok(session
            .pending
            .iter()
            .map(|p| ProposalView {
                id: p.id.clone(),
                score: p.score,
                provenance: p.aui.provenance.clone(),
                fui_preview: reify_to_fui(&p.aui, &enablement, session.current_panel),
            })
            .collect())
    }

    pub fn apply_feedback(
        &mut self,
        session_id: &str,
        decision: &FeedbackDecision,
    ) -> Result<FuiDocument, EngineError> {
        if let Some(r) = decision.rating {
            if !(1..=5).contains(&r) {
                return Err(EngineError::InvalidFeedback(format!(
                    "rating {r} is outside 1..=5"
                )));
            }
        }
        let mut session = self
            .sessions
            .remove(session_id)
            .ok_or_else(|| EngineError::UnknownSession(session_id.to_string()))?;
        let result = self.feedback(&mut session, decision);
        self.sessions.insert(session_id.to_string(), session);
        result?;
        self.persist()?;
        self.fui(session_id)
    }

    fn feedback(
        &mut self,
        session: &mut Session,
        decision: &FeedbackDecision,
    ) -> Result<(), EngineError> {
        if decision.verb != Verb::Reinitiate && session.pending.is_empty() {
            return Err(EngineError::NoPendingProposals);
        }
        let (model_id, user) = (session.model_id.clone(), session.user.clone());
        match decision.verb {
            Verb::Accept | Verb::Modify => {
                let index = match (&decision.verb, &decision.alternative_id) {
                    (Verb::Accept, _) => 0,
                    (_, None) => {
                        return Err(EngineError::InvalidFeedback(
                            "modify needs an alternative_id".into(),
                        ))
                    }
                    (_, Some(id)) => session
                        .pending
                        .iter()
                        .position(|p| &p.id == id)
                        .ok_or_else(|| EngineError::UnknownAlternative(id.clone()))?,
                };
                let fingerprint = session.pending[index].fingerprint.clone();
                let already_current = session.current.layout.fingerprint() == fingerprint;
                if !already_current {
                    self.adopt(session, index)?;
                }
                if let Some(rating) = decision.rating {
                    let profile = self.profile_mut(&model_id, &user)?;
                    if let Some(rec) = profile
                        .adaptations
                        .iter_mut()
                        .rev()
                        .find(|r| r.fingerprint == fingerprint)
                    {
                        rec.rating = Some(rating);
                    }
                }
                session.pending.clear();
            }
            Verb::Decline => {
                let top = session.pending[0].fingerprint.clone();
                let untouched = session.monitor.ordered().is_empty();
                if session.current.layout.fingerprint() == top && untouched {
                    if let Some(prev) = session.previous.take() {
                        session.current = prev;
                        session.current_panel = 0;
                    }
                    let profile = self.profile_mut(&model_id, &user)?;
                    if profile
                        .adaptations
                        .last()
                        .is_some_and(|r| r.fingerprint == top)
                    {
                        profile.adaptations.pop();
                    }
                }
                self.profile_mut(&model_id, &user)?.declined.push(top);
                session.pending.clear();
            }
            Verb::Postpone => {}
            Verb::Reinitiate => {
                *self.profile_mut(&model_id, &user)? = Profile {
                    weights_last_used: Some(session.weights),
                    ..Profile::default()
                };
                let dfs = Layout::dfs_initial(&session.model, self.config.capacity);
                session.current =
                    AbstractUI::from_layout(&session.model, &dfs, Provenance::Initial)?;
                session.previous = None;
                session.monitor = ActionMonitorList::new();
                session.current_panel = 0;
                session.iteration = 0;
                session.pending.clear();
                session.completed = false;
                session.logged = false;
                session.markov = self.markov_for(session)?;
            }
        }
        Ok(())
    }

    fn profile_mut(&mut self, model_id: &str, user: &str) -> Result<&mut Profile, EngineError> {
        self.store
            .profile_mut(model_id, user)
            .ok_or_else(|| EngineError::UnknownModel(model_id.to_string()))
    }

    pub fn set_weights(
        &mut self,
        session_id: &str,
        weights: ScoreWeights,
    ) -> Result<ScoreWeights, EngineError> {
        weights.validate().map_err(EngineError::InvalidWeights)?;
        let session = self.session_mut(session_id)?;
        session.weights = weights;
        let (model_id, user) = (session.model_id.clone(), session.user.clone());
        self.profile_mut(&model_id, &user)?.weights_last_used = Some(weights);
        self.persist()?;
        Ok(weights)
    }

    /// Ends a session. A session closed before completion still logs what was performed.
    pub fn close_session(&mut self, session_id: &str) -> Result<(), EngineError> {
        let session = self
            .sessions
            .remove(session_id)
            .ok_or_else(|| EngineError::UnknownSession(session_id.to_string()))?;
        if !session.logged && !session.monitor.ordered().is_empty() {
            self.store.record_sequence(
                &session.model_id,
                &session.user,
                session.monitor.ordered().to_vec(),
                self.config.lrs_threshold,
            )?;
        }
        self.persist()
    }

    /// Closes every live session.
    pub fn drain(&mut self) -> Result<(), EngineError> {
        for id in self.session_ids() {
            self.close_session(&id)?;
        }
        self.persist()
    }

    /// Adapted layouts adopted by the other members of `group` on `model_id`, best rated
    /// first.
    pub fn list_group_alternatives(
        &self,
        group: &str,
        model_id: &str,
        requester: Option<&str>,
    ) -> Vec<GroupAlternative> {
        let Some(members) = self.store.groups.get(group) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for member in members.iter().filter(|m| Some(m.as_str()) != requester) {
            if let Some(profile) = self.store.profile(model_id, member) {
                out.extend(profile.adaptations.iter().map(|r| GroupAlternative {
                    owner: member.clone(),
                    fingerprint: r.fingerprint.clone(),
                    layout: r.names.clone(),
                    rating: r.rating,
                    timestamp: r.timestamp,
                }));
            }
        }
        out.sort_by(|a, b| {
            b.rating
                .cmp(&a.rating)
                .then_with(|| b.timestamp.cmp(&a.timestamp))
                .then_with(|| a.owner.cmp(&b.owner))
        });
        out
    }

    /// The user's last adopted layout, when it still lays out exactly the model's actions.
    fn last_adopted(&self, session: &Session) -> Option<Layout> {
        let profile = self.store.profile(&session.model_id, &session.user)?;
        let layout = &profile.adaptations.last()?.layout;
        let n = session.model.action_count();
        let mut seen: Vec<ActionId> = layout.flatten();
        seen.sort_unstable();
        let valid = seen == (0..n).collect::<Vec<_>>()
            && layout
                .containers
                .iter()
                .all(|c| !c.is_empty() && c.len() <= self.config.capacity);
        valid.then(|| layout.clone())
    }

    /// Order grows by one per logged session of the user and per adaptation iteration, up to
    /// the configured cap. Group
    /// members' sequences are included whenever their weight is positive.
    fn markov_for(&self, session: &Session) -> Result<Option<MarkovModel>, EngineError> {
        let blended = self.store.blended_log(
            &session.model_id,
            &session.user,
            session.group.as_deref(),
            session.weights.group_weight,
        );
        if blended.is_empty() {
            return Ok(None);
        }
        let own = self
            .store
            .profile(&session.model_id, &session.user)
            .map_or(0, |p| p.sequences.len());
        let k = (own + session.iteration as usize)
            .max(1)
            .min(self.config.max_order);
        let mut markov = MarkovModel::new(k, session.model.actions())?;
        for (seq, _) in &blended {
            markov.update_online(seq)?;
        }
        Ok(Some(markov))
    }

    fn propose(&self, session: &mut Session) -> Result<Vec<Proposal>, EngineError> {
        let model = session.model.clone();
        let history = session.history();
        let blended = self.store.blended_log(
            &session.model_id,
            &session.user,
            session.group.as_deref(),
            session.weights.group_weight,
        );
        let to_ids = |seqs: Vec<Vec<String>>| -> Vec<Vec<ActionId>> {
            seqs.iter().filter_map(|s| model.ids(s).ok()).collect()
        };
        let mut builder = Reification::builder(&model)
            .history(&history)
            .capacity(self.config.capacity)
            .reference(session.current.layout.clone());
        if !blended.is_empty() {
            let lrs = extract_lrs_weighted(&blended, self.config.lrs_threshold)?;
            let full: BTreeSet<Vec<String>> = blended.iter().map(|(s, _)| s.clone()).collect();
            builder = builder
                .lrs_tier(to_ids(lrs.sequences))
                .lrs_tier(to_ids(full.into_iter().collect()));
        }
        let reification = builder.build()?;

        session.iteration += 1;
        session.markov = self.markov_for(session)?;
        let done = session.done();
        let shown: ActionSet = session.current.layout.containers[..session.current_panel]
            .iter()
            .flatten()
            .copied()
            .filter(|a| !done.contains(*a))
            .collect();
        let mut scorer = Scorer::new(&reification, session.weights).with_already_shown(shown);
        if let Some(m) = &session.markov {
            scorer = scorer.with_markov(m);
        }
        if let Some(profile) = self.store.profile(&session.model_id, &session.user) {
            for rec in &profile.adaptations {
                if let Some(r) = rec.rating {
                    scorer = scorer.with_rating(&rec.fingerprint, r);
                }
            }
            for fp in &profile.declined {
                scorer = scorer.with_decline(fp);
            }
        }
        let items = match k_best_search(&scorer, &self.config.search) {
            Ok(kb) => kb.items,
            Err(AuiError::Unsatisfiable) => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let items = if items.is_empty() {
            let layout = session.current.layout.clone();
            vec![ScoredAui {
                score: scorer.score(&layout),
                fingerprint: layout.fingerprint(),
                layout,
            }]
        } else {
            items
        };
        let provenance = Provenance::Adapted {
            iteration: session.iteration,
        };
        items
            .into_iter()
            .enumerate()
            .map(|(rank, item)| {
                Ok(Proposal {
                    id: format!("a{}-{}", session.iteration, rank),
                    aui: AbstractUI::from_layout(&model, &item.layout, provenance.clone())?,
                    score: item.score,
                    fingerprint: item.fingerprint,
                    prefix_len: reification.prefix().len(),
                })
            })
            .collect()
    }

    /// Makes a pending proposal current. Containers before the proposal's right part are
    /// shared with the current layout, so the container in progress is never rewritten.
    fn adopt(&mut self, session: &mut Session, index: usize) -> Result<(), EngineError> {
        let proposal = session.pending[index].clone();
        let previous = std::mem::replace(&mut session.current, proposal.aui.clone());
        session.previous = Some(previous);
        if session.current_panel >= proposal.prefix_len {
            session.current_panel = proposal.prefix_len;
        }
        let last = session.current.layout.containers.len().saturating_sub(1);
        session.current_panel = session.current_panel.min(last);
        let record = AdaptationRecord {
            names: proposal.aui.layout.names(&session.model),
            layout: proposal.aui.layout,
            fingerprint: proposal.fingerprint,
            provenance: proposal.aui.provenance,
            rating: None,
            timestamp: now(),
        };
        let (model_id, user) = (session.model_id.clone(), session.user.clone());
        self.profile_mut(&model_id, &user)?.adaptations.push(record);
        Ok(())
    }
}

//! Project store and job queue behind the HTTP API.
//!
//! State lives under one data directory:
//!
//! ```text
//! projects/<id>/project.json
//! projects/<id>/jobs.json
//! projects/<id>/results/<solution>.json
//! ```
//!
//! Each project has a worker thread that runs its jobs in submission order. Jobs that had not
//! finished when the service stopped are picked up again on the next start.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::mpsc::{self, Sender};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread;
use std::time::{Duration, Instant};

use planforge_core::project::{load_project, save_project, Project, ProjectError};
use planforge_core::reporting::{CostSummary, Report, SimulationResult};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ops::{
    self, Context, EngineKind, EplusContext, GenerateParams, OpsError, OptimizeParams, ReportQuery,
};

/// Smallest progress step written to disk; finer updates stay in memory.
const PERSIST_STEP: f64 = 0.01;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown project '{0}'")]
    UnknownProject(String),
    #[error("unknown job '{0}'")]
    UnknownJob(String),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error("storage: {0}")]
    Storage(String),
}

impl From<ProjectError> for ServiceError {
    fn from(e: ProjectError) -> Self {
        ServiceError::Ops(OpsError::Project(e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Generate,
    Simulate,
    Optimize,
    ExportIdf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

impl JobState {
    pub fn is_finished(self) -> bool {
        matches!(self, JobState::Done | JobState::Failed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: String,
    pub project: String,
    pub kind: JobKind,
    pub params: Value,
    pub state: JobState,
    pub progress: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Submission sequence number across the service.
    pub seq: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
    pub engine: EngineKind,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<String>,
}

#[derive(Default)]
struct State {
    projects: BTreeMap<String, Project>,
    jobs: BTreeMap<u64, Job>,
    results: BTreeMap<(String, String), SimulationResult>,
    next_project: u64,
    next_job: u64,
    /// Last progress written to disk per job.
    persisted_progress: BTreeMap<u64, f64>,
}

struct Inner {
    root: PathBuf,
    eplus: EplusContext,
    state: Mutex<State>,
    changed: Condvar,
    workers: Mutex<BTreeMap<String, Sender<u64>>>,
}

/// Cheap to clone; all clones share one store.
#[derive(Clone)]
pub struct Service {
    inner: Arc<Inner>,
}

fn storage(e: impl std::fmt::Display) -> ServiceError {
    ServiceError::Storage(e.to_string())
}

fn job_number(id: &str) -> Option<u64> {
    id.strip_prefix('j')?.parse().ok()
}

fn with_prefix(e: OpsError, prefix: &str) -> OpsError {
    match e {
        OpsError::InvalidParams { path, message } if path == "." => OpsError::InvalidParams {
            path: prefix.into(),
            message,
        },
        OpsError::InvalidParams { path, message } => OpsError::InvalidParams {
            path: format!("{prefix}.{path}"),
            message,
        },
        other => other,
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<(), ServiceError> {
    let dir = path.parent().expect("store paths have a parent");
    std::fs::create_dir_all(dir).map_err(storage)?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(storage)?;
    std::fs::write(tmp.path(), text).map_err(storage)?;
    tmp.persist(path).map_err(storage)?;
    Ok(())
}

impl Service {
    /// Opens (or creates) a store and resumes its unfinished jobs.
    pub fn open(root: &Path, eplus: EplusContext) -> Result<Self, ServiceError> {
        let mut state = State::default();
        let projects_dir = root.join("projects");
        std::fs::create_dir_all(&projects_dir).map_err(storage)?;
        let mut dirs: Vec<PathBuf> = std::fs::read_dir(&projects_dir)
            .map_err(storage)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("project.json").is_file())
            .collect();
        dirs.sort();
        for dir in dirs {
            let id = dir
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_string();
            let project = load_project(&dir.join("project.json"))?;
            if let Some(n) = id.strip_prefix('p').and_then(|n| n.parse::<u64>().ok()) {
                state.next_project = state.next_project.max(n);
            }
            if let Ok(text) = std::fs::read_to_string(dir.join("jobs.json")) {
                let jobs: Vec<Job> = serde_json::from_str(&text).map_err(storage)?;
                for j in jobs {
                    state.next_job = state.next_job.max(j.seq);
                    state.persisted_progress.insert(j.seq, j.progress);
                    state.jobs.insert(j.seq, j);
                }
            }
            if let Ok(entries) = std::fs::read_dir(dir.join("results")) {
                for entry in entries.filter_map(Result::ok) {
                    let path = entry.path();
                    let Some(sid) = path
                        .file_stem()
                        .and_then(|s| s.to_str())
                        .map(str::to_string)
                    else {
                        continue;
                    };
                    if path.extension().is_some_and(|e| e == "json") {
                        let text = std::fs::read_to_string(&path).map_err(storage)?;
                        state.results.insert(
                            (id.clone(), sid),
                            serde_json::from_str(&text).map_err(storage)?,
                        );
                    }
                }
            }
            state.projects.insert(id, project);
        }
        let pending: Vec<(String, u64)> = state
            .jobs
            .values()
            .filter(|j| !j.state.is_finished())
            .map(|j| (j.project.clone(), j.seq))
            .collect();
        let service = Service {
            inner: Arc::new(Inner {
                root: root.to_path_buf(),
                eplus,
                state: Mutex::new(state),
                changed: Condvar::new(),
                workers: Mutex::new(BTreeMap::new()),
            }),
        };
        for (project, seq) in pending {
            service.enqueue(&project, seq);
        }
        Ok(service)
    }

    fn lock(&self) -> MutexGuard<'_, State> {
        self.inner.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn project_dir(&self, id: &str) -> PathBuf {
        self.inner.root.join("projects").join(id)
    }

    fn save_project_file(&self, id: &str, project: &Project) -> Result<(), ServiceError> {
        let dir = self.project_dir(id);
        std::fs::create_dir_all(&dir).map_err(storage)?;
        save_project(project, &dir.join("project.json"))?;
        Ok(())
    }

    fn save_jobs(&self, state: &State, project: &str) -> Result<(), ServiceError> {
        let jobs: Vec<&Job> = state
            .jobs
            .values()
            .filter(|j| j.project == project)
            .collect();
        let text = serde_json::to_string_pretty(&jobs).map_err(storage)?;
        write_atomic(&self.project_dir(project).join("jobs.json"), &text)
    }

    /// Stores a project given as JSON and returns its id.
    pub fn create_project(&self, value: Value) -> Result<String, ServiceError> {
        let project = Project::from_value(value)?;
        let mut state = self.lock();
        state.next_project += 1;
        let id = format!("p{}", state.next_project);
        self.save_project_file(&id, &project)?;
        state.projects.insert(id.clone(), project);
        Ok(id)
    }

    pub fn project(&self, id: &str) -> Result<Project, ServiceError> {
        self.lock()
            .projects
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownProject(id.into()))
    }

    /// Project ids in creation order.
    pub fn project_ids(&self) -> Vec<String> {
        let state = self.lock();
        let mut ids: Vec<&String> = state.projects.keys().collect();
        ids.sort_by_key(|id| id.strip_prefix('p').and_then(|n| n.parse::<u64>().ok()));
        ids.into_iter().cloned().collect()
    }

    fn check_params(project: &Project, kind: JobKind, params: &Value) -> Result<(), OpsError> {
        let params = params.clone();
        let solution = match kind {
            JobKind::Generate => {
                ops::parse_params::<GenerateParams>(params)?;
                return Ok(());
            }
            JobKind::Simulate => ops::parse_params::<SimulateParams>(params)?.solution,
            JobKind::Optimize => ops::parse_params::<OptimizeParams>(params)?.solution,
            JobKind::ExportIdf => ops::parse_params::<ExportParams>(params)?.solution,
        };
        match solution {
            Some(s) if project.solution(&s).is_none() => Err(OpsError::InvalidParams {
                path: "solution".into(),
                message: format!("unknown solution '{s}'"),
            }),
            // a generate job queued ahead may still produce solutions, so none is not an error
            _ => Ok(()),
        }
    }

    /// Queues a job for a project.
    pub fn submit(&self, project: &str, kind: JobKind, params: Value) -> Result<Job, ServiceError> {
        let params = if params.is_null() { json!({}) } else { params };
        let job = {
            let mut state = self.lock();
            let p = state
                .projects
                .get(project)
                .ok_or_else(|| ServiceError::UnknownProject(project.into()))?;
            Self::check_params(p, kind, &params).map_err(|e| with_prefix(e, "params"))?;
            state.next_job += 1;
            let seq = state.next_job;
            let job = Job {
                id: format!("j{seq}"),
                project: project.into(),
                kind,
                params,
                state: JobState::Queued,
                progress: 0.0,
                result: None,
                error: None,
                seq,
            };
            state.jobs.insert(seq, job.clone());
            self.save_jobs(&state, project)?;
            job
        };
        self.enqueue(project, job.seq);
        Ok(job)
    }

    pub fn job(&self, id: &str) -> Result<Job, ServiceError> {
        let state = self.lock();
        job_number(id)
            .and_then(|n| state.jobs.get(&n))
            .cloned()
            .ok_or_else(|| ServiceError::UnknownJob(id.into()))
    }

    /// Blocks until the job finishes or `timeout` passes, returning its latest state.
    pub fn wait_for(&self, id: &str, timeout: Duration) -> Result<Job, ServiceError> {
        let n = job_number(id).ok_or_else(|| ServiceError::UnknownJob(id.into()))?;
        let deadline = Instant::now() + timeout;
        let mut state = self.lock();
        loop {
            let job = state
                .jobs
                .get(&n)
                .ok_or_else(|| ServiceError::UnknownJob(id.into()))?;
            let now = Instant::now();
            if job.state.is_finished() || now >= deadline {
                return Ok(job.clone());
            }
            state = self
                .inner
                .changed
                .wait_timeout(state, deadline - now)
                .unwrap_or_else(|e| e.into_inner())
                .0;
        }
    }

    fn enqueue(&self, project: &str, seq: u64) {
        let mut workers = self.inner.workers.lock().unwrap_or_else(|e| e.into_inner());
        let sender = workers.entry(project.to_string()).or_insert_with(|| {
            let (tx, rx) = mpsc::channel::<u64>();
            let service = self.clone();
            thread::Builder::new()
                .name(format!("jobs-{project}"))
                .spawn(move || {
                    for seq in rx {
                        service.execute(seq);
                    }
                })
                .expect("spawning a job worker");
            tx
        });
        sender
            .send(seq)
            .expect("worker threads live as long as the service");
    }

    fn update(&self, seq: u64, f: impl FnOnce(&mut Job)) {
        let mut state = self.lock();
        let Some(job) = state.jobs.get_mut(&seq) else {
            return;
        };
        f(job);
        let (project, progress, finished) =
            (job.project.clone(), job.progress, job.state.is_finished());
        let last = state.persisted_progress.get(&seq).copied().unwrap_or(-1.0);
        if finished || progress - last >= PERSIST_STEP || progress == 0.0 {
            state.persisted_progress.insert(seq, progress);
            // a failed write only loses progress detail; the final state is retried on finish
            let _ = self.save_jobs(&state, &project);
        }
        drop(state);
        self.inner.changed.notify_all();
    }

    fn set_progress(&self, seq: u64, p: f64) {
        self.update(seq, |j| j.progress = j.progress.max(p.clamp(0.0, 1.0)));
    }

    fn execute(&self, seq: u64) {
        let Some((job, project)) = ({
            let state = self.lock();
            state.jobs.get(&seq).and_then(|j| {
                state
                    .projects
                    .get(&j.project)
                    .map(|p| (j.clone(), p.clone()))
            })
        }) else {
            return;
        };
        if job.state.is_finished() {
            return;
        }
        // a job interrupted by a restart stays running and is executed again from the start
        self.update(seq, |j| j.state = JobState::Running);
        let outcome = self.run_job(&job, project);
        self.update(seq, |j| match outcome {
            Ok(result) => {
                j.state = JobState::Done;
                j.progress = 1.0;
                j.result = Some(result);
            }
            Err(e) => {
                j.state = JobState::Failed;
                j.error = Some(e.to_string());
            }
        });
    }

    fn run_job(&self, job: &Job, mut project: Project) -> Result<Value, ServiceError> {
        let pid = &job.project;
        let base = self.project_dir(pid);
        let params = job.params.clone();
        match job.kind {
            JobKind::Generate => {
                let p: GenerateParams = ops::parse_params(params)?;
                let ids = ops::generate(&mut project, &p, &mut |f| self.set_progress(job.seq, f))?;
                self.commit_project(pid, project)?;
                Ok(json!({ "solutions": ids }))
            }
            JobKind::Optimize => {
                let p: OptimizeParams = ops::parse_params(params)?;
                let id = ops::optimize(&mut project, &p, Some(&base), &self.work_context(pid))?;
                self.commit_project(pid, project)?;
                Ok(json!({ "solution": id }))
            }
            JobKind::Simulate => {
                let p: SimulateParams = ops::parse_params(params)?;
                let solution = ops::select_solution(&project, p.solution.as_deref())?;
                let ctx = Context::new(&project, Some(&base))?;
                let result =
                    ops::simulate(&ctx, &solution.layout, p.engine, &self.work_context(pid))?;
                let n = result.series.len();
                self.store_result(pid, &solution.id, result)?;
                Ok(json!({ "solution": solution.id, "engine": p.engine, "series": n }))
            }
            JobKind::ExportIdf => {
                let p: ExportParams = ops::parse_params(params)?;
                let solution = ops::select_solution(&project, p.solution.as_deref())?;
                let ctx = Context::new(&project, Some(&base))?;
                let text = ops::export_idf(&ctx, &solution.layout)?;
                let path = base.join("results").join(format!("{}.idf", solution.id));
                write_atomic(&path, &text)?;
                Ok(json!({ "solution": solution.id, "bytes": text.len() }))
            }
        }
    }

    fn work_context(&self, pid: &str) -> EplusContext {
        EplusContext {
            executable: self.inner.eplus.executable.clone(),
            work_root: Some(self.project_dir(pid).join("runs")),
        }
    }

    /// Replaces a project after a job changed its solutions; cached results of solutions that
    /// no longer exist are dropped.
    fn commit_project(&self, pid: &str, project: Project) -> Result<(), ServiceError> {
        self.save_project_file(pid, &project)?;
        let mut state = self.lock();
        state
            .results
            .retain(|(p, s), _| p != pid || project.solution(s).is_some());
        state.projects.insert(pid.to_string(), project);
        Ok(())
    }

    fn store_result(
        &self,
        pid: &str,
        sid: &str,
        result: SimulationResult,
    ) -> Result<(), ServiceError> {
        let text = serde_json::to_string(&result).map_err(storage)?;
        write_atomic(
            &self
                .project_dir(pid)
                .join("results")
                .join(format!("{sid}.json")),
            &text,
        )?;
        self.lock().results.insert((pid.into(), sid.into()), result);
        Ok(())
    }

    pub fn solutions(&self, pid: &str) -> Result<Vec<ops::SolutionSummary>, ServiceError> {
        Ok(ops::solution_summaries(&self.project(pid)?))
    }

    /// Finds the project holding a solution: the given one, or the first by creation order.
    pub fn locate(
        &self,
        sid: &str,
        project: Option<&str>,
    ) -> Result<(String, Project), ServiceError> {
        if let Some(pid) = project {
            let p = self.project(pid)?;
            return match p.solution(sid) {
                Some(_) => Ok((pid.to_string(), p)),
                None => Err(OpsError::UnknownSolution(sid.into()).into()),
            };
        }
        for pid in self.project_ids() {
            let p = self.project(&pid)?;
            if p.solution(sid).is_some() {
                return Ok((pid, p));
            }
        }
        Err(OpsError::UnknownSolution(sid.into()).into())
    }

    pub fn layout(
        &self,
        sid: &str,
        project: Option<&str>,
    ) -> Result<ops::LayoutGeometry, ServiceError> {
        let (_, p) = self.locate(sid, project)?;
        Ok(ops::layout_geometry(
            &p.solution(sid).expect("located").layout,
        ))
    }

    /// The stored simulation of a solution, running the surrogate when there is none yet.
    fn result(&self, pid: &str, p: &Project, sid: &str) -> Result<SimulationResult, ServiceError> {
        if let Some(r) = self.lock().results.get(&(pid.to_string(), sid.to_string())) {
            return Ok(r.clone());
        }
        let ctx = Context::new(p, Some(&self.project_dir(pid)))?;
        let layout = &p.solution(sid).expect("located").layout;
        let result = ops::simulate(
            &ctx,
            layout,
            EngineKind::Surrogate,
            &EplusContext::default(),
        )?;
        self.store_result(pid, sid, result.clone())?;
        Ok(result)
    }

    pub fn variables(
        &self,
        sid: &str,
        project: Option<&str>,
    ) -> Result<Vec<ops::VariableInfo>, ServiceError> {
        let (pid, p) = self.locate(sid, project)?;
        Ok(ops::variable_catalog(&self.result(&pid, &p, sid)?))
    }

    pub fn report(
        &self,
        sid: &str,
        project: Option<&str>,
        query: &ReportQuery,
    ) -> Result<Report, ServiceError> {
        let (pid, p) = self.locate(sid, project)?;
        let result = self.result(&pid, &p, sid)?;
        let weather = p.weather(Some(&self.project_dir(&pid)))?;
        Ok(ops::report(&result, &weather, query)?)
    }

    pub fn idf(&self, sid: &str, project: Option<&str>) -> Result<String, ServiceError> {
        let (pid, p) = self.locate(sid, project)?;
        let ctx = Context::new(&p, Some(&self.project_dir(&pid)))?;
        Ok(ops::export_idf(
            &ctx,
            &p.solution(sid).expect("located").layout,
        )?)
    }

    pub fn costs(&self, sid: &str, project: Option<&str>) -> Result<CostSummary, ServiceError> {
        let (_, p) = self.locate(sid, project)?;
        Ok(ops::costs(&p))
    }
}

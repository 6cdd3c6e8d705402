#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::time::Duration;

use planforge::ops::EplusContext;
use planforge::service::{Job, JobState, Service};
use serde_json::Value;

pub const WAIT: Duration = Duration::from_secs(120);

pub fn bundled_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data/projects")
        .join(format!("{name}.json"))
}

pub fn bundled(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(bundled_path(name)).unwrap()).unwrap()
}

pub fn open(root: &Path) -> Service {
    Service::open(root, EplusContext::default()).unwrap()
}

pub fn wait_done(service: &Service, id: &str) -> Job {
    let job = service.wait_for(id, WAIT).unwrap();
    assert_eq!(job.state, JobState::Done, "job {id} ended as {job:?}");
    job
}

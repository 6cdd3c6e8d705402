mod common;

use std::path::Path;
use std::process::Command;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use common::{bundled, bundled_path, open, wait_done};
use http_body_util::BodyExt;
use planforge::http::router;
use planforge::ops::{self, Context, EngineKind, EplusContext, ReportQuery};
use planforge::service::Service;
use planforge_core::project::load_project;
use planforge_core::reporting::ReportPeriod;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Reply {
    status: StatusCode,
    content_type: String,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }
}

async fn call(service: &Service, method: &str, uri: &str, body: Option<Value>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = router(service.clone())
        .oneshot(req.body(body).unwrap())
        .await
        .unwrap();
    let status = resp.status();
    let content_type = resp
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let body = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    Reply {
        status,
        content_type,
        body,
    }
}

async fn wait(service: &Service, id: &str) -> Value {
    let (s, id) = (service.clone(), id.to_string());
    let job = tokio::task::spawn_blocking(move || wait_done(&s, &id))
        .await
        .unwrap();
    serde_json::to_value(job).unwrap()
}

fn cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_planforge"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "planforge {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn cli_json(args: &[&str]) -> Value {
    serde_json::from_slice(&cli(args)).unwrap()
}

#[tokio::test]
async fn project_and_job_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let s = open(dir.path());
    let created = call(&s, "POST", "/projects", Some(bundled("single_storey"))).await;
    assert_eq!(created.status, StatusCode::CREATED);
    let pid = created.json()["id"].as_str().unwrap().to_string();

    let project = call(&s, "GET", &format!("/projects/{pid}"), None).await;
    assert_eq!(project.status, StatusCode::OK);
    assert_eq!(project.json(), bundled("single_storey"));

    let body = json!({ "kind": "generate", "params": { "max_generations": 50, "n_solutions": 2 } });
    let submitted = call(&s, "POST", &format!("/projects/{pid}/jobs"), Some(body)).await;
    assert_eq!(submitted.status, StatusCode::ACCEPTED);
    let job = submitted.json();
    assert_eq!(job["state"], "queued");
    assert_eq!(job["kind"], "generate");
    let id = job["id"].as_str().unwrap();
    wait(&s, id).await;
    let fetched = call(&s, "GET", &format!("/jobs/{id}"), None).await.json();
    assert_eq!(fetched["state"], "done");
    assert_eq!(fetched["progress"], 1.0);

    let list = call(&s, "GET", &format!("/projects/{pid}/solutions"), None)
        .await
        .json();
    let list = list.as_array().unwrap();
    assert_eq!(list.len(), 2);
    for field in [
        "id",
        "fitness",
        "penalties",
        "floor_area",
        "space_areas",
        "cost_total",
    ] {
        assert!(list[0].get(field).is_some(), "summary lacks {field}");
    }
    let sid = list[0]["id"].as_str().unwrap();

    let layout = call(&s, "GET", &format!("/solutions/{sid}/layout"), None)
        .await
        .json();
    let storeys = layout["storeys"].as_array().unwrap();
    assert_eq!(storeys.len(), 1);
    assert!(storeys[0]["spaces"]
        .as_array()
        .unwrap()
        .iter()
        .all(|sp| sp["polygon"].as_array().unwrap().len() == 4));

    let vars = call(&s, "GET", &format!("/solutions/{sid}/variables"), None)
        .await
        .json();
    let names: Vec<&str> = vars
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["variable"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"Zone Mean Air Temperature"));

    let uri =
        format!("/solutions/{sid}/report?variable=Zone%20Mean%20Air%20Temperature&period=all_year");
    let report = call(&s, "GET", &uri, None).await.json();
    assert_eq!(report["values"].as_array().unwrap().len(), 8760);
    let uri = format!(
        "/solutions/{sid}/report?variable=Zone%20Mean%20Air%20Temperature&period=trimester_1"
    );
    assert_eq!(
        call(&s, "GET", &uri, None).await.json()["values"]
            .as_array()
            .unwrap()
            .len(),
        2160
    );

    let idf = call(&s, "GET", &format!("/solutions/{sid}/idf"), None).await;
    assert_eq!(idf.status, StatusCode::OK);
    assert!(idf.content_type.starts_with("text/plain"));
    assert!(String::from_utf8(idf.body)
        .unwrap()
        .starts_with("Version, 8.8;"));

    let costs = call(&s, "GET", &format!("/solutions/{sid}/costs"), None)
        .await
        .json();
    assert!(costs.get("grand_total").is_some());
}

#[tokio::test]
async fn unknown_ids_are_404() {
    let dir = tempfile::tempdir().unwrap();
    let s = open(dir.path());
    for uri in [
        "/projects/p1",
        "/projects/p1/solutions",
        "/jobs/j1",
        "/solutions/abc/layout",
        "/solutions/abc/variables",
        "/solutions/abc/report?variable=x",
        "/solutions/abc/idf",
        "/solutions/abc/costs",
    ] {
        let r = call(&s, "GET", uri, None).await;
        assert_eq!(r.status, StatusCode::NOT_FOUND, "{uri}");
        assert!(r.json()["error"].is_string());
    }
    let r = call(
        &s,
        "POST",
        "/projects/p1/jobs",
        Some(json!({ "kind": "generate" })),
    )
    .await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn invalid_input_is_422_with_a_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let s = open(dir.path());
    let mut bad = bundled("single_storey");
    bad["settings"]["epsap"]["mu"] = json!("many");
    let r = call(&s, "POST", "/projects", Some(bad)).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["path"], "settings.epsap.mu");

    let pid = call(&s, "POST", "/projects", Some(bundled("single_storey")))
        .await
        .json()["id"]
        .as_str()
        .unwrap()
        .to_string();
    let jobs = format!("/projects/{pid}/jobs");
    let cases = [
        (json!({ "kind": "render" }), "kind"),
        (
            json!({ "kind": "generate", "params": { "max_generations": "lots" } }),
            "params.max_generations",
        ),
        (
            json!({ "kind": "simulate", "params": { "engine": 3 } }),
            "params.engine",
        ),
        (
            json!({ "kind": "optimize", "params": { "solution": "missing" } }),
            "params.solution",
        ),
    ];
    for (body, path) in cases {
        let r = call(&s, "POST", &jobs, Some(body)).await;
        assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(r.json()["path"], path);
    }

    let sid = ops::ranked(&s.project(&pid).unwrap())[0].id.clone();
    let r = call(
        &s,
        "GET",
        &format!("/solutions/{sid}/report?variable=Nope"),
        None,
    )
    .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(r.json()["error"]
        .as_str()
        .unwrap()
        .contains("Zone Mean Air Temperature"));
    let r = call(
        &s,
        "GET",
        &format!("/solutions/{sid}/report?variable=Zone%20Mean%20Air%20Temperature&period=week"),
        None,
    )
    .await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(r.json()["path"], "period");
    let r = call(&s, "GET", &format!("/solutions/{sid}/report"), None).await;
    assert_eq!(r.json()["path"], "variable");
}

/// Every body the service returns matches what the CLI, or the operations it uses, give for the
/// same project.
#[tokio::test]
async fn http_matches_cli_on_the_same_project() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("project.json");
    std::fs::copy(bundled_path("two_storey"), &file).unwrap();
    let f = file.to_str().unwrap();

    let generated = cli_json(&[
        "generate",
        "--project",
        f,
        "--seed",
        "5",
        "--max-generations",
        "400",
        "--n-solutions",
        "3",
    ]);
    let s = open(&dir.path().join("store"));
    let pid = call(&s, "POST", "/projects", Some(bundled("two_storey")))
        .await
        .json()["id"]
        .as_str()
        .unwrap()
        .to_string();
    let body = json!({ "kind": "generate", "params": { "seed": 5, "max_generations": 400, "n_solutions": 3 } });
    let job = call(&s, "POST", &format!("/projects/{pid}/jobs"), Some(body))
        .await
        .json();
    let done = wait(&s, job["id"].as_str().unwrap()).await;
    assert_eq!(done["result"], generated);

    let local = load_project(&file).unwrap();
    let http_list = call(&s, "GET", &format!("/projects/{pid}/solutions"), None)
        .await
        .json();
    assert_eq!(
        http_list,
        serde_json::to_value(ops::solution_summaries(&local)).unwrap()
    );
    assert_eq!(
        call(&s, "GET", &format!("/projects/{pid}"), None)
            .await
            .json(),
        local.to_value()
    );

    let ctx = Context::new(&local, Some(dir.path())).unwrap();
    for rec in &local.layouts {
        let sid = rec.id.as_str();
        let layout = call(&s, "GET", &format!("/solutions/{sid}/layout"), None)
            .await
            .json();
        assert_eq!(
            layout,
            serde_json::to_value(ops::layout_geometry(&rec.layout)).unwrap()
        );

        let idf = call(&s, "GET", &format!("/solutions/{sid}/idf"), None).await;
        let out = Command::new(env!("CARGO_BIN_EXE_planforge"))
            .args(["export-idf", "--project", f, "--solution", sid])
            .output()
            .unwrap();
        if out.status.success() {
            assert_eq!(idf.body, out.stdout);
        } else {
            // infeasible layouts have no building model in either front end
            assert_eq!(idf.status, StatusCode::UNPROCESSABLE_ENTITY);
        }

        let result = ops::simulate(
            &ctx,
            &rec.layout,
            EngineKind::Surrogate,
            &EplusContext::default(),
        )
        .unwrap();
        let vars = call(&s, "GET", &format!("/solutions/{sid}/variables"), None)
            .await
            .json();
        assert_eq!(
            vars,
            serde_json::to_value(ops::variable_catalog(&result)).unwrap()
        );

        for period in ["all_year", "trimester_3", "coldest_day", "hottest_day"] {
            let key = rec.layout.spaces().next().unwrap().zone_name();
            let uri = format!(
                "/solutions/{sid}/report?variable=Zone%20Mean%20Air%20Temperature&key={key}&period={period}"
            );
            let http = call(&s, "GET", &uri, None).await.json();
            let args = [
                "report",
                "--project",
                f,
                "--solution",
                sid,
                "--variable",
                "Zone Mean Air Temperature",
            ];
            let from_cli = cli_json(&[&args[..], &["--key", &key, "--period", period]].concat());
            assert_eq!(http, from_cli, "{sid} {period}");
            let query = ReportQuery {
                variable: "Zone Mean Air Temperature".into(),
                key: Some(key),
                period: period.parse::<ReportPeriod>().unwrap(),
            };
            assert_eq!(
                http,
                serde_json::to_value(ops::report(&result, &ctx.weather, &query).unwrap()).unwrap()
            );
        }

        let costs = call(&s, "GET", &format!("/solutions/{sid}/costs"), None)
            .await
            .json();
        assert_eq!(costs, serde_json::to_value(ops::costs(&local)).unwrap());
    }

    // an optimize job and the optimize command produce the same solution
    let best = ops::ranked(&local)[0].id.clone();
    let from_cli = cli_json(&[
        "optimize",
        "--project",
        f,
        "--solution",
        &best,
        "--passes",
        "1",
    ]);
    let body = json!({ "kind": "optimize", "params": { "solution": best, "passes": 1 } });
    let job = call(&s, "POST", &format!("/projects/{pid}/jobs"), Some(body))
        .await
        .json();
    let id = job["id"].as_str().unwrap().to_string();
    let s2 = s.clone();
    let finished = tokio::task::spawn_blocking(move || s2.wait_for(&id, common::WAIT).unwrap())
        .await
        .unwrap();
    match finished.result {
        Some(result) => {
            assert_eq!(result, from_cli);
            assert_eq!(
                s.project(&pid).unwrap().to_value(),
                load_project(&file).unwrap().to_value()
            );
        }
        None => panic!("optimize job failed: {:?}", finished.error),
    }
}

#[test]
fn validate_reports_problems_through_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli_json(&[
        "validate",
        "--project",
        bundled_path("three_storey").to_str().unwrap(),
    ]);
    assert_eq!(out["ok"], true);

    let mut broken = bundled("single_storey");
    broken["format_version"] = json!(99);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, broken.to_string()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_planforge"))
        .args(["validate", "--project"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
    assert!(Path::new(&path).exists());
}

//! JSON HTTP API over [`Service`].

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use planforge_core::project::ProjectError;
use planforge_core::reporting::ReportPeriod;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::ops::{OpsError, ReportQuery};
use crate::service::{JobKind, Service, ServiceError};

/// An error body `{"error": ..., "path": ...}` with its status.
pub struct ApiError {
    status: StatusCode,
    message: String,
    path: Option<String>,
}

impl ApiError {
    fn unprocessable(message: impl Into<String>, path: Option<String>) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            message: message.into(),
            path,
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let message = e.to_string();
        let (status, path) = match e {
            ServiceError::UnknownProject(_) | ServiceError::UnknownJob(_) => {
                (StatusCode::NOT_FOUND, None)
            }
            ServiceError::Ops(op) => match op {
                OpsError::UnknownSolution(_) | OpsError::NoSolutions => {
                    (StatusCode::NOT_FOUND, None)
                }
                OpsError::InvalidParams { path, .. } => {
                    (StatusCode::UNPROCESSABLE_ENTITY, Some(path))
                }
                OpsError::Project(ProjectError::SchemaViolation { path, .. }) => {
                    (StatusCode::UNPROCESSABLE_ENTITY, Some(path))
                }
                OpsError::Project(ProjectError::FormatVersionMismatch { .. })
                | OpsError::UnknownVariable { .. }
                | OpsError::Idf(_) => (StatusCode::UNPROCESSABLE_ENTITY, None),
                _ => (StatusCode::INTERNAL_SERVER_ERROR, None),
            },
            ServiceError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, None),
        };
        ApiError {
            status,
            message,
            path,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(p) = self.path {
            body["path"] = Value::String(p);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Runs blocking store work off the async executor.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> ApiResult<T> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: e.to_string(),
            path: None,
        }),
    }
}

fn json_body(
    body: Result<Json<Value>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<Value> {
    body.map(|Json(v)| v)
        .map_err(|e| ApiError::unprocessable(e.body_text(), None))
}

pub fn router(service: Service) -> Router {
    Router::new()
        .route("/projects", post(create_project))
        .route("/projects/{id}", get(get_project))
        .route("/projects/{id}/jobs", post(submit_job))
        .route("/projects/{id}/solutions", get(solutions))
        .route("/jobs/{id}", get(get_job))
        .route("/solutions/{id}/layout", get(layout))
        .route("/solutions/{id}/variables", get(variables))
        .route("/solutions/{id}/report", get(report))
        .route("/solutions/{id}/idf", get(idf))
        .route("/solutions/{id}/costs", get(costs))
        .with_state(service)
}

/// Serves the API until the process is stopped.
pub async fn serve(service: Service, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(service)).await
}

async fn create_project(
    State(s): State<Service>,
    body: Result<Json<Value>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let value = json_body(body)?;
    let id = blocking(move || s.create_project(value)).await?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))))
}

async fn get_project(State(s): State<Service>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let project = blocking(move || s.project(&id)).await?;
    Ok(Json(project.to_value()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JobRequest {
    kind: JobKind,
    #[serde(default)]
    params: Value,
}

async fn submit_job(
    State(s): State<Service>,
    Path(id): Path<String>,
    body: Result<Json<Value>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let value = json_body(body)?;
    let req: JobRequest = serde_path_to_error::deserialize(value)
        .map_err(|e| ApiError::unprocessable(e.inner().to_string(), Some(e.path().to_string())))?;
    let job = blocking(move || s.submit(&id, req.kind, req.params)).await?;
    Ok((StatusCode::ACCEPTED, Json(job)))
}

async fn get_job(State(s): State<Service>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(move || s.job(&id)).await?))
}

async fn solutions(
    State(s): State<Service>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(move || s.solutions(&id)).await?))
}

/// Optional `?project=` that picks among projects sharing a solution id.
#[derive(Deserialize)]
struct Scope {
    project: Option<String>,
}

async fn layout(
    State(s): State<Service>,
    Path(id): Path<String>,
    Query(q): Query<Scope>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(
        blocking(move || s.layout(&id, q.project.as_deref())).await?,
    ))
}

async fn variables(
    State(s): State<Service>,
    Path(id): Path<String>,
    Query(q): Query<Scope>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(
        blocking(move || s.variables(&id, q.project.as_deref())).await?,
    ))
}

#[derive(Deserialize)]
struct ReportArgs {
    variable: Option<String>,
    key: Option<String>,
    period: Option<String>,
    project: Option<String>,
}

async fn report(
    State(s): State<Service>,
    Path(id): Path<String>,
    Query(q): Query<ReportArgs>,
) -> ApiResult<impl IntoResponse> {
    let variable = q.variable.ok_or_else(|| {
        ApiError::unprocessable("missing query parameter", Some("variable".into()))
    })?;
    let period = match q.period.as_deref() {
        None => ReportPeriod::AllYear,
        Some(p) => p
            .parse()
            .map_err(|e: planforge_core::reporting::ReportError| {
                ApiError::unprocessable(e.to_string(), Some("period".into()))
            })?,
    };
    let query = ReportQuery {
        variable,
        key: q.key,
        period,
    };
    Ok(Json(
        blocking(move || s.report(&id, q.project.as_deref(), &query)).await?,
    ))
}

async fn idf(
    State(s): State<Service>,
    Path(id): Path<String>,
    Query(q): Query<Scope>,
) -> ApiResult<impl IntoResponse> {
    let text = blocking(move || s.idf(&id, q.project.as_deref())).await?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], text))
}

async fn costs(
    State(s): State<Service>,
    Path(id): Path<String>,
    Query(q): Query<Scope>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(
        blocking(move || s.costs(&id, q.project.as_deref())).await?,
    ))
}

use std::collections::HashMap;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use itmap_core::layout::Layout;
use itmap_core::{
    AttrKind, ClickSpace, ClusterAssignment, ConstraintSet, Metric, Session, SessionId,
    SessionParams, Sigma,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::ApiError;
use crate::store::DatasetMeta;
use crate::{AppState, JobState};

type ApiResult<T> = Result<T, ApiError>;

pub(crate) fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/datasets", post(upload_dataset))
        .route("/datasets/{id}", get(dataset_info))
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(session_layout))
        .route("/sessions/{id}/document", get(session_document))
        .route("/sessions/{id}/crosses", post(cross))
        .route("/sessions/{id}/cuts", post(cut))
        .route("/sessions/{id}/restore", post(restore))
        .route("/sessions/{id}/offset", post(offset))
        .route("/sessions/{id}/divide", post(divide))
        .route("/sessions/{id}/conquer", post(conquer))
        .route("/sessions/{id}/finalize", post(finalize))
        .route(
            "/sessions/{id}/constraints",
            get(get_constraints).put(put_constraints),
        )
        .route("/sessions/{id}/violations", get(violations))
        .route("/sessions/{id}/assignment", get(assignment))
        .route("/jobs/{id}", get(job_status))
        .with_state(state)
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

fn parse_id(raw: &str) -> ApiResult<SessionId> {
    raw.parse()
        .map_err(|_| ApiError::bad_request(format!("`{raw}` is not a session id")))
}

fn query_value<T: std::str::FromStr>(
    query: &HashMap<String, String>,
    key: &str,
) -> ApiResult<Option<T>>
where
    T::Err: std::fmt::Display,
{
    query
        .get(key)
        .map(|raw| {
            raw.parse::<T>()
                .map_err(|e| ApiError::bad_request(format!("query parameter `{key}`: {e}")))
        })
        .transpose()
}

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("worker failed: {e}")))?
}

#[derive(Serialize)]
struct AssignmentBody {
    k: usize,
    component_of: Vec<usize>,
}

impl From<ClusterAssignment> for AssignmentBody {
    fn from(a: ClusterAssignment) -> Self {
        Self {
            k: a.k(),
            component_of: a.component_of().to_vec(),
        }
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

fn dataset_json(id: &str, ds: &itmap_core::Dataset) -> serde_json::Value {
    json!({
        "id": id,
        "name": ds.name(),
        "n": ds.len(),
        "d": ds.dim(),
        "attr_kind": ds.kind(),
        "labelled": ds.labels().is_some(),
        "classes": ds.class_count(),
    })
}

/// `POST /datasets?kind=&metric=&labels_col=&name=` with a CSV body.
async fn upload_dataset(
    State(state): State<AppState>,
    Query(query): Query<HashMap<String, String>>,
    body: Bytes,
) -> ApiResult<Response> {
    let text = String::from_utf8(body.to_vec())
        .map_err(|_| ApiError::bad_request("dataset body must be UTF-8 text"))?;
    let metric: Option<Metric> = query_value(&query, "metric")?;
    let kind: Option<AttrKind> = query_value(&query, "kind")?;
    let kind = match (kind, metric) {
        (Some(kind), Some(metric)) if metric.attr_kind() != kind => {
            return Err(itmap_core::Error::MetricMismatch { metric, kind }.into())
        }
        (Some(kind), _) => kind,
        (None, Some(metric)) => metric.attr_kind(),
        (None, None) => AttrKind::Numeric,
    };
    let label_column: Option<usize> = query_value(&query, "labels_col")?;
    let name = query
        .get("name")
        .cloned()
        .unwrap_or_else(|| "dataset".into());

    let mut wb = state.workbench();
    let before = wb.datasets().count();
    let id = wb.import_csv(&text, kind, label_column, &name)?;
    if wb.datasets().count() > before {
        let meta = DatasetMeta {
            id: id.clone(),
            name,
            kind,
            label_column,
        };
        if let Err(e) = state.0.store.save_dataset(&meta, &text) {
            *wb = state.0.store.load().map_err(ApiError::storage)?;
            return Err(ApiError::storage(e));
        }
    }
    let ds = wb.dataset(&id)?;
    Ok((StatusCode::CREATED, Json(dataset_json(&id, ds))).into_response())
}

async fn dataset_info(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<serde_json::Value>> {
    let wb = state.workbench();
    let ds = wb.dataset(&id)?;
    Ok(Json(dataset_json(&id, ds)))
}

#[derive(Deserialize)]
struct CreateSession {
    dataset: String,
    #[serde(flatten)]
    params: SessionParams,
}

fn session_created(session: &Session) -> Response {
    (
        StatusCode::CREATED,
        Json(json!({ "session": session.id(), "layout": session.layout() })),
    )
        .into_response()
}

/// Store a new top-level session under the next free id.
fn commit_new(state: &AppState, session: Session) -> ApiResult<SessionId> {
    let mut wb = state.workbench();
    let session = wb.stage_session(session);
    state
        .0
        .store
        .save_session(&session)
        .map_err(ApiError::storage)?;
    let id = session.id();
    wb.insert_session(session);
    Ok(id)
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let req: CreateSession = parse_body(&body)?;
    let ds = state.workbench().dataset(&req.dataset)?.clone();
    let build = {
        let dataset_id = req.dataset.clone();
        move || Session::create(0, dataset_id, &ds, &req.params).map_err(ApiError::from)
    };
    let n = state.workbench().dataset(&req.dataset)?.len();
    if n <= state.0.sync_limit {
        let session = blocking(build).await?;
        let id = commit_new(&state, session)?;
        let wb = state.workbench();
        return Ok(session_created(wb.session(id)?));
    }

    let job = state.new_job();
    let worker = state.clone();
    tokio::spawn(async move {
        let permit = worker.0.job_permits.clone().acquire_owned().await;
        let result = blocking(build).await.and_then(|s| commit_new(&worker, s));
        drop(permit);
        let outcome = match result {
            Ok(session) => JobState::Done { session },
            Err(error) => {
                tracing::warn!(job, %error, "background pipeline failed");
                JobState::Failed { error }
            }
        };
        worker.jobs().insert(job, outcome);
    });
    Ok((
        StatusCode::ACCEPTED,
        Json(json!({ "job": job, "status": "pending" })),
    )
        .into_response())
}

async fn job_status(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<serde_json::Value>> {
    let id: u64 = id
        .parse()
        .map_err(|_| ApiError::bad_request(format!("`{id}` is not a job id")))?;
    let jobs = state.jobs();
    let job = jobs.get(&id).ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "job_not_found",
            format!("job {id} does not exist"),
        )
    })?;
    let mut value = serde_json::to_value(job).map_err(|e| ApiError::internal(e.to_string()))?;
    value["job"] = json!(id);
    Ok(Json(value))
}

async fn list_sessions(State(state): State<AppState>) -> Json<serde_json::Value> {
    let wb = state.workbench();
    let list: Vec<_> = wb
        .sessions()
        .map(|s| {
            json!({
                "id": s.id(),
                "n": s.len(),
                "dataset": s.dataset().id,
                "parent": s.origin().map(|o| o.parent),
            })
        })
        .collect();
    Json(json!(list))
}

async fn session_layout(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<Layout>> {
    let id = parse_id(&id)?;
    let wb = state.workbench();
    Ok(Json(wb.session(id)?.layout()))
}

async fn session_document(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let bytes = state.workbench().session(id)?.to_document().to_bytes();
    Ok(([(header::CONTENT_TYPE, "application/json")], bytes).into_response())
}

/// Apply `f` to a copy of the session, persist it, then publish it.
fn mutate<T>(
    state: &AppState,
    id: SessionId,
    f: impl FnOnce(&mut Session) -> itmap_core::Result<T>,
) -> ApiResult<T> {
    let mut wb = state.workbench();
    let mut session = wb.session(id)?.clone();
    let out = f(&mut session)?;
    state
        .0
        .store
        .save_session(&session)
        .map_err(ApiError::storage)?;
    wb.insert_session(session);
    Ok(out)
}

#[derive(Deserialize)]
struct CrossBody {
    point: Vec<f64>,
    #[serde(default)]
    space: ClickSpace,
}

async fn cross(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let id = parse_id(&id)?;
    let req: CrossBody = parse_body(&body)?;
    let (edge, a) = mutate(&state, id, |s| s.cross(&req.point, req.space))?;
    Ok(Json(
        json!({ "edge": edge, "assignment": AssignmentBody::from(a) }),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CutBody {
    edge: Option<usize>,
    longest: Option<usize>,
}

async fn cut(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let id = parse_id(&id)?;
    let req: CutBody = parse_body(&body)?;
    let (edges, a) = match (req.edge, req.longest) {
        (Some(e), None) => mutate(&state, id, |s| Ok((vec![e], s.cut_edge(e)?)))?,
        (None, Some(k)) => mutate(&state, id, |s| {
            let edges = s.longest_edges(k)?;
            Ok((edges, s.cut_longest(k)?))
        })?,
        _ => {
            return Err(ApiError::bad_request(
                "give exactly one of `edge` or `longest`",
            ))
        }
    };
    Ok(Json(
        json!({ "edges": edges, "assignment": AssignmentBody::from(a) }),
    ))
}

#[derive(Deserialize)]
struct EdgeBody {
    edge: usize,
}

async fn restore(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let id = parse_id(&id)?;
    let req: EdgeBody = parse_body(&body)?;
    let a = mutate(&state, id, |s| s.restore_edge(req.edge))?;
    Ok(Json(
        json!({ "edge": req.edge, "assignment": AssignmentBody::from(a) }),
    ))
}

#[derive(Deserialize)]
struct OffsetBody {
    component: usize,
    delta: Vec<f64>,
}

async fn offset(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Layout>> {
    let id = parse_id(&id)?;
    let req: OffsetBody = parse_body(&body)?;
    let layout = mutate(&state, id, |s| {
        s.set_component_offset(req.component, &req.delta)?;
        Ok(s.layout())
    })?;
    Ok(Json(layout))
}

/// Store a child built off-lock and record it on its parent.
fn commit_child(state: &AppState, child: Session) -> ApiResult<SessionId> {
    let mut wb = state.workbench();
    let (parent, child) = wb.stage_child(child)?;
    let store = &state.0.store;
    store.save_session(&child).map_err(ApiError::storage)?;
    if let Err(e) = store.save_session(&parent) {
        let _ = store.remove_session(child.id());
        return Err(ApiError::storage(e));
    }
    let id = child.id();
    wb.insert_session(parent);
    wb.insert_session(child);
    Ok(id)
}

#[derive(Deserialize)]
struct ComponentBody {
    component: usize,
}

async fn divide(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let req: ComponentBody = parse_body(&body)?;
    let parent = state.workbench().session(id)?.clone();
    let child = blocking(move || parent.divide(req.component).map_err(ApiError::from)).await?;
    let child = commit_child(&state, child)?;
    let wb = state.workbench();
    Ok(session_created(wb.session(child)?))
}

#[derive(Deserialize)]
struct ConquerBody {
    component: usize,
    sigma: Sigma,
}

async fn conquer(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let req: ConquerBody = parse_body(&body)?;
    let (parent, root) = {
        let wb = state.workbench();
        let parent = wb.session(id)?.clone();
        let root = wb.dataset(&parent.dataset().id)?.clone();
        (parent, root)
    };
    let child = blocking(move || {
        parent
            .conquer(req.component, req.sigma, &root)
            .map_err(ApiError::from)
    })
    .await?;
    let child = commit_child(&state, child)?;
    let wb = state.workbench();
    Ok(session_created(wb.session(child)?))
}

#[derive(Deserialize)]
struct FinalizeBody {
    child: SessionId,
}

async fn finalize(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let id = parse_id(&id)?;
    let req: FinalizeBody = parse_body(&body)?;
    let mut wb = state.workbench();
    let parent = wb.stage_finalize(id, req.child)?;
    state
        .0
        .store
        .save_session(&parent)
        .map_err(ApiError::storage)?;
    wb.insert_session(parent);
    let merged = wb.merged_assignment(id)?;
    Ok(Json(
        json!({ "child": req.child, "assignment": AssignmentBody::from(merged) }),
    ))
}

async fn get_constraints(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Json<ConstraintSet>> {
    let id = parse_id(&id)?;
    Ok(Json(state.workbench().session(id)?.constraints().clone()))
}

async fn put_constraints(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<serde_json::Value>> {
    let id = parse_id(&id)?;
    let cs: ConstraintSet = parse_body(&body)?;
    let report = mutate(&state, id, |s| {
        s.set_constraints(cs)?;
        Ok(s.violations())
    })?;
    Ok(Json(json!({ "violations": report })))
}

/// `?merged=true` checks against the assignment merged through finalized
/// children.
async fn violations(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<Json<itmap_core::ViolationReport>> {
    let id = parse_id(&id)?;
    let merged: bool = query_value(&query, "merged")?.unwrap_or(false);
    let wb = state.workbench();
    let report = if merged {
        wb.merged_violations(id)?
    } else {
        wb.session(id)?.violations()
    };
    Ok(Json(report))
}

/// Merged assignment as `node,component` CSV over root-dataset node ids.
async fn assignment(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Response> {
    let id = parse_id(&id)?;
    let wb = state.workbench();
    let merged = wb.merged_assignment(id)?;
    let csv = merged.to_csv(Some(wb.session(id)?.node_ids()));
    Ok(([(header::CONTENT_TYPE, "text/csv")], csv).into_response())
}

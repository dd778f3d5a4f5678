use std::path::{Component, Path as FsPath};
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use ergo_core::aggregate::{
    gauge_distribution, representative_frames, table_aggregate, timeline_window, DownsampledSeries, GaugeSeries,
    TableAggregate,
};
use ergo_core::joint::{BodySide, JointId};
use ergo_core::reba::TableId;
use ergo_core::selection::{
    evaluate_composite, linked_counts, BrushSet, FrameIdSet, LinkedOverlay, LinkedViews, TimelineOverlay, TimelineRequest,
};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use super::state::{AppState, DatasetEntry, Session};
use crate::report::Report;

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/datasets", get(list_datasets))
        .route("/datasets/{id}/summary", get(summary))
        .route("/datasets/{id}/tables/{table}", get(table))
        .route("/datasets/{id}/gauge/{joint}", get(gauge))
        .route("/datasets/{id}/timeline", get(timeline))
        .route("/datasets/{id}/representatives", get(representatives))
        .route("/datasets/{id}/frames/{idx}/image", get(image))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/brushes", put(put_brushes))
        .route("/sessions/{id}/selection", get(selection))
        .with_state(state)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn dataset(state: &AppState, id: &str) -> Result<Arc<DatasetEntry>, ApiError> {
    state.dataset(id).ok_or_else(|| ApiError::not_found(format!("unknown dataset {id:?}")))
}

fn session(state: &AppState, id: &str) -> Result<Session, ApiError> {
    let uuid = Uuid::parse_str(id).map_err(|_| ApiError::bad_request(format!("malformed session id {id:?}")))?;
    let handle = state.session(uuid).ok_or_else(|| ApiError::not_found(format!("unknown session {id}")))?;
    let s = handle.lock().expect("session lock").clone();
    Ok(s)
}

/// The selection of `session_id` on `entry`, or `None` without a session.
fn scope(state: &AppState, entry: &DatasetEntry, session_id: Option<&str>) -> Result<Option<FrameIdSet>, ApiError> {
    let Some(id) = session_id else { return Ok(None) };
    let s = session(state, id)?;
    if s.dataset_id != entry.scored.dataset().id {
        return Err(ApiError::bad_request(format!("session {id} belongs to dataset {:?}", s.dataset_id)));
    }
    evaluate_composite(&s.brush_set, &entry.scored)
        .map(Some)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))
}

fn parse_side(side: Option<&str>) -> Result<BodySide, ApiError> {
    match side.unwrap_or("left") {
        "left" => Ok(BodySide::Left),
        "right" => Ok(BodySide::Right),
        other => Err(ApiError::bad_request(format!("side must be left or right, got {other:?}"))),
    }
}

fn parse_table(table: &str) -> Result<TableId, ApiError> {
    table.to_ascii_uppercase().parse().map_err(|_| ApiError::not_found(format!("unknown table {table:?}")))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub id: String,
    pub frames: u64,
    pub included: u64,
    pub excluded: u64,
    pub fps: f64,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
}

async fn list_datasets(State(state): State<Shared>) -> Json<Vec<DatasetInfo>> {
    Json(
        state
            .datasets()
            .map(|e| {
                let d = e.scored.dataset();
                DatasetInfo {
                    id: d.id.clone(),
                    frames: d.frames.len() as u64,
                    included: e.scored.len() as u64,
                    excluded: d.excluded.len() as u64,
                    fps: d.fps,
                    t_start: d.frames.first().map(|f| f.timestamp_s),
                    t_end: d.frames.last().map(|f| f.timestamp_s),
                }
            })
            .collect(),
    )
}

async fn summary(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Report> {
    Ok(Json(dataset(&state, &id)?.report.clone()))
}

#[derive(Debug, Default, Deserialize)]
struct ScopeQuery {
    side: Option<String>,
    session: Option<String>,
    #[serde(default)]
    monochrome: bool,
}

async fn table(
    State(state): State<Shared>,
    Path((id, table)): Path<(String, String)>,
    Query(q): Query<ScopeQuery>,
) -> ApiResult<TableAggregate> {
    let entry = dataset(&state, &id)?;
    let table = parse_table(&table)?;
    let side = parse_side(q.side.as_deref())?;
    let sel = scope(&state, &entry, q.session.as_deref())?;
    Ok(Json(table_aggregate(&entry.scored, side, table, sel.as_ref())))
}

async fn gauge(
    State(state): State<Shared>,
    Path((id, joint)): Path<(String, String)>,
    Query(q): Query<ScopeQuery>,
) -> ApiResult<GaugeSeries> {
    let entry = dataset(&state, &id)?;
    let joint: JointId = joint.parse().map_err(|_| ApiError::not_found(format!("unknown joint {joint:?}")))?;
    let sel = scope(&state, &entry, q.session.as_deref())?;
    let g = gauge_distribution(&entry.scored, joint, sel.as_ref());
    Ok(Json(if q.monochrome { g.monochrome() } else { g }))
}

#[derive(Debug, Default, Deserialize)]
struct TimelineQuery {
    joints: Option<String>,
    t0: Option<f64>,
    t1: Option<f64>,
    max_points: Option<usize>,
    session: Option<String>,
}

const DEFAULT_MAX_POINTS: usize = 500;

impl TimelineQuery {
    /// Fills in defaults: all joints and the whole recording.
    fn request(&self, entry: &DatasetEntry) -> Result<TimelineRequest, ApiError> {
        let joints = match self.joints.as_deref() {
            None | Some("") => JointId::ALL.to_vec(),
            Some(list) => list
                .split(',')
                .map(|j| j.trim().parse().map_err(|_| ApiError::bad_request(format!("unknown joint {j:?}"))))
                .collect::<Result<_, _>>()?,
        };
        let d = entry.scored.dataset();
        let first = d.frames.first().map_or(0.0, |f| f.timestamp_s);
        let last = d.frames.last().map_or(0.0, |f| f.timestamp_s + 1.0 / d.fps);
        Ok(TimelineRequest {
            joints,
            t0: self.t0.unwrap_or(first),
            t1: self.t1.unwrap_or(last),
            max_points: self.max_points.unwrap_or(DEFAULT_MAX_POINTS),
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TimelineResponse {
    pub series: Vec<DownsampledSeries>,
    /// Per-bucket selected counts when a session is given.
    pub selected: Option<Vec<TimelineOverlay>>,
}

async fn timeline(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<TimelineQuery>,
) -> ApiResult<TimelineResponse> {
    let entry = dataset(&state, &id)?;
    let req = q.request(&entry)?;
    let series = timeline_window(&entry.scored, &req.joints, req.t0, req.t1, req.max_points)
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let selected = match scope(&state, &entry, q.session.as_deref())? {
        None => None,
        Some(sel) => {
            let views = LinkedViews { tables: Vec::new(), gauges: Vec::new(), timeline: Some(req) };
            let overlay = linked_counts(&sel, &entry.scored, &views).map_err(|e| ApiError::bad_request(e.to_string()))?;
            Some(overlay.timeline)
        }
    };
    Ok(Json(TimelineResponse { series, selected }))
}

#[derive(Debug, Deserialize)]
struct RepresentativesQuery {
    table: Option<String>,
    side: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Representative {
    pub score: u8,
    pub frame_index: Option<u64>,
    pub image_ref: Option<String>,
}

async fn representatives(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<RepresentativesQuery>,
) -> ApiResult<Vec<Representative>> {
    let entry = dataset(&state, &id)?;
    let table = parse_table(q.table.as_deref().unwrap_or("C"))?;
    let side = parse_side(q.side.as_deref())?;
    let reps = representative_frames(&entry.scored, table, side)
        .into_iter()
        .map(|(score, frame_index)| Representative {
            score,
            frame_index,
            image_ref: frame_index.and_then(|i| entry.scored.dataset().frame(i)).and_then(|f| f.image_ref.clone()),
        })
        .collect();
    Ok(Json(reps))
}

fn content_type(path: &FsPath) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        Some("gif") => "image/gif",
        Some("webp") => "image/webp",
        Some("bmp") => "image/bmp",
        Some("svg") => "image/svg+xml",
        _ => "application/octet-stream",
    }
}

async fn image(State(state): State<Shared>, Path((id, idx)): Path<(String, u64)>) -> Result<Response, ApiError> {
    let entry = dataset(&state, &id)?;
    let frame = entry.scored.dataset().frame(idx).ok_or_else(|| ApiError::not_found(format!("unknown frame {idx}")))?;
    let rel = frame.image_ref.as_deref().ok_or_else(|| ApiError::not_found(format!("frame {idx} has no image")))?;
    let rel_path = FsPath::new(rel);
    if !rel_path.components().all(|c| matches!(c, Component::Normal(_) | Component::CurDir)) {
        return Err(ApiError::bad_request(format!("image path {rel:?} escapes the image directory")));
    }
    let missing = || ApiError::not_found(format!("image {rel:?} not found"));
    let root = entry.images_dir.canonicalize().map_err(|_| missing())?;
    let full = root.join(rel_path).canonicalize().map_err(|_| missing())?;
    if !full.starts_with(&root) {
        return Err(ApiError::bad_request(format!("image path {rel:?} escapes the image directory")));
    }
    let bytes = tokio::fs::read(&full).await.map_err(|_| missing())?;
    Ok(([(header::CONTENT_TYPE, content_type(&full))], bytes).into_response())
}

#[derive(Debug, Deserialize)]
struct NewSession {
    dataset_id: String,
    #[serde(default)]
    brush_set: BrushSet,
}

fn check_brushes(set: &BrushSet, entry: &DatasetEntry) -> Result<FrameIdSet, ApiError> {
    set.validate().map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    evaluate_composite(set, &entry.scored).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))
}

async fn create_session(State(state): State<Shared>, Json(body): Json<NewSession>) -> Result<Response, ApiError> {
    let entry = dataset(&state, &body.dataset_id)?;
    check_brushes(&body.brush_set, &entry)?;
    let s = state.create_session(&body.dataset_id, body.brush_set);
    Ok((StatusCode::CREATED, Json(s)).into_response())
}

async fn get_session(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Session> {
    Ok(Json(session(&state, &id)?))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BrushesUpdated {
    pub session: Session,
    pub selected: u64,
}

async fn put_brushes(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Json(set): Json<BrushSet>,
) -> ApiResult<BrushesUpdated> {
    let current = session(&state, &id)?;
    let entry = dataset(&state, &current.dataset_id)?;
    let selected = check_brushes(&set, &entry)?.len() as u64;
    let handle = state.session(current.session_id).ok_or_else(|| ApiError::not_found(format!("unknown session {id}")))?;
    let updated = {
        let mut s = handle.lock().expect("session lock");
        s.brush_set = set;
        s.clone()
    };
    state.persist();
    Ok(Json(BrushesUpdated { session: updated, selected }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SelectionResponse {
    pub session_id: Uuid,
    pub dataset_id: String,
    pub brush_set: BrushSet,
    pub frame_ids: FrameIdSet,
    pub overlay: LinkedOverlay,
}

async fn selection(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<TimelineQuery>,
) -> ApiResult<SelectionResponse> {
    let s = session(&state, &id)?;
    let entry = dataset(&state, &s.dataset_id)?;
    let frame_ids = check_brushes(&s.brush_set, &entry)?;
    let mut views = LinkedViews::all();
    if q.t0.is_some() || q.t1.is_some() || q.joints.is_some() || q.max_points.is_some() {
        views.timeline = Some(q.request(&entry)?);
    }
    let overlay = linked_counts(&frame_ids, &entry.scored, &views).map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(Json(SelectionResponse { session_id: s.session_id, dataset_id: s.dataset_id, brush_set: s.brush_set, frame_ids, overlay }))
}

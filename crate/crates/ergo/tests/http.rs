#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use ergo::server::{router, AppState, DatasetEntry};
use ergo::synthetic::{painting_spec, write_synthetic};
use ergo::Asset;
use ergo_core::aggregate::{gauge_distribution, table_aggregate, GaugeSeries, TableAggregate};
use ergo_core::filter::FilterPolicy;
use ergo_core::frame::Dataset;
use ergo_core::joint::{BodySide, JointId};
use ergo_core::reba::{score_dataset, RebaConfig, TableId};
use ergo_core::selection::{
    evaluate_composite, linked_counts, Brush, BrushKind, BrushSet, Cell, Combine, FrameIdSet, Interval, LinkedViews,
};
use http_body_util::BodyExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn get_json(app: &Router, uri: &str) -> (StatusCode, Value) {
    let (status, bytes) = call(app, "GET", uri, None).await;
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn painting_state(dir: &Path, duration_s: f64) -> AppState {
    write_synthetic(&painting_spec(duration_s, 30.0), 1, &dir.join("painting")).unwrap();
    let (state, warnings) = AppState::load_dir(dir, &Asset::standard(), &FilterPolicy::default()).unwrap();
    assert!(warnings.is_empty(), "{warnings:?}");
    state
}

fn random_entry(n: usize, seed: u64) -> DatasetEntry {
    let mut d = common::random_dataset(&mut ChaCha8Rng::seed_from_u64(seed), n, 30.0);
    d.id = format!("random{seed}");
    DatasetEntry::new(score_dataset(d, &RebaConfig::standard()), "images".into(), "sha256:x")
}

async fn new_session(app: &Router, dataset: &str) -> String {
    let (status, body) = call(app, "POST", "/sessions", Some(json!({ "dataset_id": dataset }))).await;
    assert_eq!(status, StatusCode::CREATED);
    let v: Value = serde_json::from_slice(&body).unwrap();
    v["session_id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn aggregates_equal_library_calls() {
    let dir = tempfile::tempdir().unwrap();
    let state = Arc::new(painting_state(dir.path(), 60.0));
    let scored = &state.dataset("painting").unwrap().scored;
    let app = router(state.clone());

    let (status, list) = get_json(&app, "/datasets").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list[0]["id"], "painting");
    assert_eq!(list[0]["frames"], 1800);

    for (table, side) in [("A", "left"), ("B", "right"), ("C", "left")] {
        let (status, body) = call(&app, "GET", &format!("/datasets/painting/tables/{table}?side={side}"), None).await;
        assert_eq!(status, StatusCode::OK);
        let got: TableAggregate = serde_json::from_slice(&body).unwrap();
        let side = if side == "left" { BodySide::Left } else { BodySide::Right };
        assert_eq!(got, table_aggregate(scored, side, table.parse().unwrap(), None));
    }

    let (_, body) = call(&app, "GET", "/datasets/painting/gauge/upper_arm_right", None).await;
    let g: GaugeSeries = serde_json::from_slice(&body).unwrap();
    let want = gauge_distribution(scored, "upper_arm_right".parse().unwrap(), None);
    assert_eq!(serde_json::to_value(&g).unwrap(), serde_json::to_value(&want).unwrap());

    let (_, summary) = get_json(&app, "/datasets/painting/summary").await;
    assert_eq!(summary["included"], scored.len() as u64);

    let (_, reps) = get_json(&app, "/datasets/painting/representatives?table=C&side=right").await;
    let reps = reps.as_array().unwrap();
    assert!(reps.iter().any(|r| r["score"] == 10));
    assert!(reps.iter().all(|r| r["frame_index"].is_u64() && r["image_ref"].is_string()));
}

#[tokio::test]
async fn brushes_drive_linked_overlays() {
    let mut state = AppState::new();
    state.insert_dataset(random_entry(3000, 1));
    let state = Arc::new(state);
    let scored = &state.dataset("random1").unwrap().scored;
    let app = router(state.clone());
    let sid = new_session(&app, "random1").await;

    // two heatmap cells on table B, one brush
    let agg = table_aggregate(scored, BodySide::Left, TableId::B, None);
    let mut busy: Vec<Cell> = Vec::new();
    for (r, row) in agg.heatmap.cell_counts.iter().enumerate() {
        for (c, &n) in row.iter().enumerate() {
            if n > 0 && busy.len() < 2 {
                busy.push(Cell { row: r, col: c });
            }
        }
    }
    let set = BrushSet {
        brushes: vec![Brush {
            id: "cells".into(),
            kind: BrushKind::HeatmapCell { table: TableId::B, side: BodySide::Left, cells: busy.clone() },
            active: true,
        }],
        combine: Combine::Intersection,
    };
    let (status, body) = call(&app, "PUT", &format!("/sessions/{sid}/brushes"), Some(serde_json::to_value(&set).unwrap())).await;
    assert_eq!(status, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
    let expected = busy.iter().map(|c| agg.heatmap.cell_counts[c.row][c.col]).sum::<u64>();
    let v: Value = serde_json::from_slice(&body).unwrap();
    assert_eq!(v["selected"], expected);

    let (status, sel) = get_json(&app, &format!("/sessions/{sid}/selection")).await;
    assert_eq!(status, StatusCode::OK);
    let ids: FrameIdSet = serde_json::from_value(sel["frame_ids"].clone()).unwrap();
    assert_eq!(ids, common::brushes::brute_force(&set, scored));
    let overlay = linked_counts(&ids, scored, &LinkedViews::all()).unwrap();
    assert_eq!(sel["overlay"], serde_json::to_value(&overlay).unwrap());
    assert_eq!(sel["overlay"]["selected"], expected);

    // scoped aggregate equals the library call with the selection
    let (_, body) = call(&app, "GET", &format!("/datasets/random1/tables/B?side=left&session={sid}"), None).await;
    let scoped: TableAggregate = serde_json::from_slice(&body).unwrap();
    assert_eq!(scoped, table_aggregate(scored, BodySide::Left, TableId::B, Some(&ids)));
    assert_eq!(scoped.heatmap.total(), expected);
}

#[tokio::test]
async fn random_brush_sets_match_linear_scan() {
    let mut state = AppState::new();
    state.insert_dataset(random_entry(2000, 2));
    let state = Arc::new(state);
    let scored = &state.dataset("random2").unwrap().scored;
    let app = router(state.clone());
    let sid = new_session(&app, "random2").await;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..25 {
        let set = common::brushes::random_set(&mut rng, 2000.0 / 30.0);
        let (status, _) = call(&app, "PUT", &format!("/sessions/{sid}/brushes"), Some(serde_json::to_value(&set).unwrap())).await;
        assert_eq!(status, StatusCode::OK);
        let (_, sel) = get_json(&app, &format!("/sessions/{sid}/selection")).await;
        let ids: FrameIdSet = serde_json::from_value(sel["frame_ids"].clone()).unwrap();
        assert_eq!(ids, common::brushes::brute_force(&set, scored));
    }
}

#[tokio::test]
async fn sessions_are_isolated_and_time_brushes_round_trip() {
    let mut state = AppState::new();
    state.insert_dataset(random_entry(900, 3));
    let app = router(Arc::new(state));
    let a = new_session(&app, "random3").await;
    let b = new_session(&app, "random3").await;
    assert_ne!(a, b);

    let windows = json!({ "brushes": [
        { "id": "w1", "type": "time_range", "ranges": [ { "lo": 2.0, "hi": 4.0 } ] },
        { "id": "w2", "type": "time_range", "ranges": [ { "lo": 10.0, "hi": 12.5 } ] }
    ], "combine": "union" });
    let (status, _) = call(&app, "PUT", &format!("/sessions/{a}/brushes"), Some(windows.clone())).await;
    assert_eq!(status, StatusCode::OK);

    let (_, sa) = get_json(&app, &format!("/sessions/{a}")).await;
    let stored: BrushSet = serde_json::from_value(sa["brush_set"].clone()).unwrap();
    assert_eq!(stored, serde_json::from_value::<BrushSet>(windows).unwrap());
    let (_, sel_a) = get_json(&app, &format!("/sessions/{a}/selection")).await;
    let (_, sel_b) = get_json(&app, &format!("/sessions/{b}/selection")).await;
    assert_eq!(sel_a["frame_ids"].as_array().unwrap().len(), 61 + 76);
    assert_eq!(sel_b["frame_ids"].as_array().unwrap().len(), 900);
}

#[tokio::test]
async fn timeline_respects_max_points() {
    let mut state = AppState::new();
    let d = common::sinusoid_dataset(&mut ChaCha8Rng::seed_from_u64(4), 15_861, 30.0, 8.0, 2.0);
    state.insert_dataset(DatasetEntry::new(score_dataset(d, &RebaConfig::standard()), "images".into(), "sha256:x"));
    let app = router(Arc::new(state));
    let (status, v) = get_json(&app, "/datasets/sinusoid/timeline?max_points=500").await;
    assert_eq!(status, StatusCode::OK);
    let series = v["series"].as_array().unwrap();
    assert_eq!(series.len(), JointId::ALL.len());
    assert!(series.iter().all(|s| s["buckets"].as_array().unwrap().len() <= 500));
    assert!(v["selected"].is_null());

    let sid = new_session(&app, "sinusoid").await;
    let (_, v) = get_json(&app, &format!("/datasets/sinusoid/timeline?joints=trunk_center,neck_center&t0=10&t1=100&max_points=50&session={sid}")).await;
    let sel = v["selected"].as_array().unwrap();
    assert_eq!(sel.len(), 2);
    assert_eq!(sel[0]["bucket_counts"], sel[0]["selected_counts"]);

    let (status, _) = get_json(&app, "/datasets/sinusoid/timeline?t0=5&t1=5").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn errors_are_reported() {
    let mut state = AppState::new();
    state.insert_dataset(random_entry(100, 5));
    state.insert_dataset(random_entry(100, 6));
    let app = router(Arc::new(state));
    assert_eq!(get_json(&app, "/datasets/nope/summary").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get_json(&app, "/datasets/random5/tables/D").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get_json(&app, "/datasets/random5/tables/A?side=middle").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(get_json(&app, "/datasets/random5/gauge/elbow").await.0, StatusCode::NOT_FOUND);
    assert_eq!(get_json(&app, "/sessions/not-a-uuid/selection").await.0, StatusCode::BAD_REQUEST);
    assert_eq!(
        get_json(&app, "/sessions/00000000-0000-0000-0000-000000000000/selection").await.0,
        StatusCode::NOT_FOUND
    );
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({ "dataset_id": "nope" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let sid = new_session(&app, "random5").await;
    let bad = json!({ "brushes": [ { "id": "c", "type": "heatmap_cell", "table": "A", "side": "left", "cells": [ { "row": 9, "col": 0 } ] } ] });
    let (status, body) = call(&app, "PUT", &format!("/sessions/{sid}/brushes"), Some(bad)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(String::from_utf8_lossy(&body).contains("outside"));
    let dup = json!({ "brushes": [
        { "id": "x", "type": "time_range", "ranges": [] }, { "id": "x", "type": "time_range", "ranges": [] }
    ] });
    let (status, _) = call(&app, "PUT", &format!("/sessions/{sid}/brushes"), Some(dup)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    // a session only scopes its own dataset
    assert_eq!(get_json(&app, &format!("/datasets/random6/tables/A?session={sid}")).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn images_are_served_without_escaping_the_directory() {
    let dir = tempfile::tempdir().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir_all(images.join("frames")).unwrap();
    std::fs::write(images.join("frames/a.png"), b"\x89PNG fake").unwrap();
    std::fs::write(dir.path().join("secret.txt"), b"secret").unwrap();

    let mut d: Dataset = common::random_dataset(&mut ChaCha8Rng::seed_from_u64(9), 4, 1.0);
    d.id = "img".into();
    d.frames[0].image_ref = Some("frames/a.png".into());
    d.frames[1].image_ref = Some("../secret.txt".into());
    d.frames[2].image_ref = None;
    d.frames[3].image_ref = Some("frames/missing.png".into());
    let mut state = AppState::new();
    state.insert_dataset(DatasetEntry::new(score_dataset(d, &RebaConfig::standard()), images, "sha256:x"));
    let app = router(Arc::new(state));

    let resp = app.clone().oneshot(Request::get("/datasets/img/frames/0/image").body(Body::empty()).unwrap()).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()["content-type"], "image/png");
    assert_eq!(resp.into_body().collect().await.unwrap().to_bytes().as_ref(), b"\x89PNG fake");
    assert_eq!(call(&app, "GET", "/datasets/img/frames/1/image", None).await.0, StatusCode::BAD_REQUEST);
    assert_eq!(call(&app, "GET", "/datasets/img/frames/2/image", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/datasets/img/frames/3/image", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/datasets/img/frames/99/image", None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn sessions_survive_a_restart_with_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("sessions.json");
    let state = painting_state(dir.path(), 10.0).with_snapshot(snap.clone()).unwrap();
    let app = router(Arc::new(state));
    let sid = new_session(&app, "painting").await;
    let set = BrushSet {
        brushes: vec![Brush {
            id: "elbow".into(),
            kind: BrushKind::AngleRange { joint: "lower_arm_left".parse().unwrap(), ranges: vec![Interval::new(60.0, 100.0)] },
            active: true,
        }],
        combine: Combine::Intersection,
    };
    call(&app, "PUT", &format!("/sessions/{sid}/brushes"), Some(serde_json::to_value(&set).unwrap())).await;
    let (_, before) = get_json(&app, &format!("/sessions/{sid}/selection")).await;

    let restarted = painting_state(dir.path(), 10.0).with_snapshot(snap).unwrap();
    let app2 = router(Arc::new(restarted));
    let (status, after) = get_json(&app2, &format!("/sessions/{sid}/selection")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);
    let scored = &painting_state(dir.path(), 10.0).dataset("painting").unwrap().scored.clone();
    let ids: FrameIdSet = serde_json::from_value(after["frame_ids"].clone()).unwrap();
    assert_eq!(ids, evaluate_composite(&set, scored).unwrap());
}

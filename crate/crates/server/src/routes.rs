use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use ontology_authoring::{ontology, Ontology};
use project_store::ProjectStore;
use scaffolding::{pending_interventions, Pending};
use serde::{Deserialize, Serialize};
use sitcalc::{ActionInstance, FluentInstance, Term, Timestamp};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;
use tutor_app::{AppConfig, GlossaryEntry, StepTab, GLOSSARY_LOOKUP};

use crate::error::ApiError;

/// Shared server state.
#[derive(Clone)]
pub struct AppState {
    pub store: Arc<ProjectStore>,
    pub config: Arc<AppConfig>,
}

type ApiResult<T> = Result<T, ApiError>;

/// Runs blocking store work off the async workers.
async fn blocking<T: Send + 'static>(
    state: &AppState,
    f: impl FnOnce(&ProjectStore) -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    let store = state.store.clone();
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload.map(|Json(t)| t).map_err(|e| ApiError::bad_request(e.body_text()))
}

pub fn router(state: AppState) -> Router {
    let mut app = Router::new()
        .route("/projects", post(create_project).get(list_projects))
        .route("/projects/{id}", get(project_info))
        .route("/projects/{id}/actions", post(submit_action))
        .route("/projects/{id}/fluents", get(fluents))
        .route("/projects/{id}/ontology", get(project_ontology))
        .route("/projects/{id}/interventions", get(interventions))
        .route("/projects/{id}/ids", post(fresh_id))
        .route("/config/steps", get(steps))
        .route("/glossary/{term}", get(glossary));
    if let Some(dir) = &state.config.server.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    } else {
        app = app.fallback(|| async { ApiError::not_found("no such route") });
    }
    let origins: Vec<HeaderValue> =
        state.config.server.cors_origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()).collect();
    let app = app.with_state(state);
    if origins.is_empty() {
        app
    } else {
        app.layer(
            CorsLayer::new()
                .allow_origin(AllowOrigin::list(origins))
                .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
                .allow_headers([axum::http::header::CONTENT_TYPE]),
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateProject {
    pub kb: String,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct Created {
    pub id: String,
}

async fn create_project(
    State(state): State<AppState>,
    payload: Result<Json<CreateProject>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Created>)> {
    let req = body(payload)?;
    let id = blocking(&state, move |st| Ok(st.create_project(&req.kb)?)).await?;
    Ok((StatusCode::CREATED, Json(Created { id })))
}

async fn list_projects(State(state): State<AppState>) -> ApiResult<Json<Vec<String>>> {
    Ok(Json(blocking(&state, |st| Ok(st.list_projects()?)).await?))
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct ProjectView {
    pub id: String,
    pub kb: String,
    pub length: usize,
    pub digest: String,
}

async fn project_info(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<ProjectView>> {
    let view = blocking(&state, move |st| {
        let s = st.situation(&id)?;
        Ok(ProjectView { kb: st.kb(&id)?, id, length: s.depth(), digest: s.digest().to_string() })
    })
    .await?;
    Ok(Json(view))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitAction {
    pub kind: String,
    #[serde(default)]
    pub args: Vec<Term>,
    pub actor: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct Submitted {
    pub seq: u64,
    pub pending: Vec<Pending>,
}

async fn submit_action(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<SubmitAction>, JsonRejection>,
) -> ApiResult<Json<Submitted>> {
    let req = body(payload)?;
    let out = blocking(&state, move |st| {
        let a = ActionInstance::new(req.kind, req.args)
            .by(req.actor.unwrap_or_else(|| "anon".into()))
            .at(Timestamp::now());
        let done = st.append(&id, a)?;
        let pending = pending_interventions(st.reasoner(), &done.situation)?;
        Ok(Submitted { seq: done.seq, pending })
    })
    .await?;
    Ok(Json(out))
}

async fn fluents(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<Vec<FluentInstance>>> {
    let out = blocking(&state, move |st| {
        let s = st.situation(&id)?;
        let kind = params.get("kind").map(String::as_str);
        if let Some(k) = kind {
            st.reasoner().registry().fluent(k)?;
        }
        Ok(st.reasoner().holding_fluents(&s, kind)?.into_iter().collect())
    })
    .await?;
    Ok(Json(out))
}

async fn project_ontology(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Ontology>> {
    let out = blocking(&state, move |st| Ok(ontology(st.reasoner(), &st.situation(&id)?)?)).await?;
    Ok(Json(out))
}

async fn interventions(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Vec<Pending>>> {
    let out = blocking(&state, move |st| Ok(pending_interventions(st.reasoner(), &st.situation(&id)?)?)).await?;
    Ok(Json(out))
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct FreshId {
    pub prefix: Option<String>,
}

async fn fresh_id(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<FreshId>, JsonRejection>,
) -> ApiResult<Json<Created>> {
    let req = body(payload)?;
    let prefix = req.prefix.unwrap_or_else(|| "n".into());
    if prefix.is_empty() || !prefix.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
        return Err(ApiError::bad_request("prefix must be lowercase letters, digits or `_`"));
    }
    let out = blocking(&state, move |st| {
        st.info(&id)?;
        Ok(st.fresh_id(&prefix)?)
    })
    .await?;
    Ok(Json(Created { id: out }))
}

async fn steps(State(state): State<AppState>) -> Json<Vec<StepTab>> {
    Json(state.config.steps.clone())
}

async fn glossary(
    State(state): State<AppState>,
    Path(term): Path<String>,
    Query(params): Query<HashMap<String, String>>,
) -> ApiResult<Json<GlossaryEntry>> {
    let Some(entry) = state.config.glossary.lookup(&term).cloned() else {
        return Err(ApiError::not_found(format!("no glossary entry for `{term}`")));
    };
    if let Some(project) = params.get("project").cloned() {
        let actor = params.get("actor").cloned().unwrap_or_else(|| "anon".into());
        blocking(&state, move |st| {
            let a = ActionInstance::new(GLOSSARY_LOOKUP, vec![Term::Sym(term)]).by(actor).at(Timestamp::now());
            st.append(&project, a)?;
            Ok(())
        })
        .await?;
    }
    Ok(Json(entry))
}

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::header::{ACCEPT, CONTENT_DISPOSITION, CONTENT_TYPE, LOCATION};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use patchr_core::{
    entity_report, export_updates, patch_from_feedback, patch_from_turtle, patches_to_turtle, query_patches, report,
    snapshot_turtle, to_sparql, FeedbackVote, Patch, PatchBody, PatchFilter, PatchGroup, PatchOrder, PatchStatus,
    PatchType, QuestionContext, SparqlDialect, SubmitOutcome, VotePosition,
};
use patchr_rdf::{Iri, PrefixMap};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::config::{with_slash, ApiConfig};
use crate::error::ApiError;
use crate::writer::RepoHandle;

const TURTLE: &str = "text/turtle; charset=utf-8";
const SPARQL_UPDATE: &str = "application/sparql-update; charset=utf-8";

#[derive(Clone)]
struct AppState {
    repo: RepoHandle,
    config: Arc<ApiConfig>,
    prefixes: Arc<PrefixMap>,
}

pub fn router(repo: RepoHandle, config: ApiConfig) -> Router {
    let mut prefixes = PrefixMap::new();
    if let Ok(ns) = Iri::new(with_slash(&config.repo_base)) {
        let _ = prefixes.insert("repo", ns);
    }
    let cors = cors_layer(&config.cors_origins);
    let state = AppState {
        repo,
        config: Arc::new(config),
        prefixes: Arc::new(prefixes),
    };
    let router = Router::new()
        .route("/patches", get(list_patches).post(submit_patch))
        .route("/patches/{id}", get(get_patch))
        .route("/patch/{n}", get(get_minted_patch))
        .route("/patches/{id}/votes", post(cast_vote))
        .route("/patches/{id}/status", post(change_status))
        .route("/patches/{id}/sparql", get(patch_sparql))
        .route("/patches/{id}/groups", post(assign_group))
        .route("/datasets", get(list_datasets))
        .route("/datasets/{iri}/updates", get(dataset_updates))
        .route("/reports/{kind}", get(get_report))
        .route("/entities", get(entities))
        .route("/snapshot.ttl", get(snapshot))
        .route("/feedback", post(submit_feedback))
        .route("/groups", get(list_groups).post(create_group))
        .with_state(state);
    match cors {
        Some(layer) => router.layer(layer),
        None => router,
    }
}

fn cors_layer(origins: &[String]) -> Option<CorsLayer> {
    if origins.is_empty() {
        return None;
    }
    let allow = if origins.iter().any(|o| o == "*") {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    Some(CorsLayer::new().allow_origin(allow).allow_methods(Any).allow_headers(Any))
}

// ----------------------------------------------------------- negotiation

fn media_type(headers: &HeaderMap) -> Option<String> {
    headers
        .get(CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(|v| v.split(';').next().unwrap_or("").trim().to_ascii_lowercase())
}

fn is_turtle(media: &str) -> bool {
    matches!(media, "text/turtle" | "application/x-turtle" | "application/turtle")
}

fn is_json(media: &str) -> bool {
    media == "application/json" || media.ends_with("+json")
}

/// True when the Accept header ranks Turtle above JSON.
fn wants_turtle(headers: &HeaderMap) -> bool {
    let Some(accept) = headers.get(ACCEPT).and_then(|v| v.to_str().ok()) else {
        return false;
    };
    let (mut turtle, mut json) = (0.0f32, 0.0f32);
    for item in accept.split(',') {
        let mut parts = item.split(';');
        let media = parts.next().unwrap_or("").trim().to_ascii_lowercase();
        let q = parts
            .filter_map(|p| p.trim().strip_prefix("q=").and_then(|q| q.parse::<f32>().ok()))
            .next()
            .unwrap_or(1.0);
        if is_turtle(&media) {
            turtle = turtle.max(q);
        } else if is_json(&media) || media == "*/*" || media == "application/*" {
            json = json.max(q);
        }
    }
    turtle > json
}

fn json_body<T: DeserializeOwned>(headers: &HeaderMap, body: &Bytes) -> Result<T, ApiError> {
    if let Some(media) = media_type(headers) {
        if !is_json(&media) {
            return Err(ApiError::unsupported_media_type(&media));
        }
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

fn turtle_response(text: String) -> Response {
    ([(CONTENT_TYPE, TURTLE)], text).into_response()
}

fn patches_response(headers: &HeaderMap, patches: &[&Patch], prefixes: &PrefixMap) -> Response {
    if wants_turtle(headers) {
        turtle_response(patches_to_turtle(patches.iter().copied(), [], prefixes))
    } else {
        Json(patches).into_response()
    }
}

// ----------------------------------------------------------- parameters

fn query_pairs(raw: Option<String>) -> Vec<(String, String)> {
    raw.map(|q| url::form_urlencoded::parse(q.as_bytes()).into_owned().collect())
        .unwrap_or_default()
}

fn param<'a>(pairs: &'a [(String, String)], key: &str) -> Option<&'a str> {
    pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn parse_param<T: std::str::FromStr>(pairs: &[(String, String)], key: &str) -> Result<Option<T>, ApiError>
where
    T::Err: std::fmt::Display,
{
    param(pairs, key)
        .map(|v| v.parse::<T>().map_err(|e| ApiError::bad_request(format!("{key}: {e}"))))
        .transpose()
}

fn iri_param(pairs: &[(String, String)], key: &str) -> Result<Option<Iri>, ApiError> {
    param(pairs, key)
        .map(|v| Iri::new(v).map_err(|e| ApiError::bad_request(format!("{key}: {e}"))))
        .transpose()
}

fn parse_flag(pairs: &[(String, String)], key: &str, default: bool) -> Result<bool, ApiError> {
    match param(pairs, key) {
        None => Ok(default),
        Some("true" | "1" | "yes") => Ok(true),
        Some("false" | "0" | "no") => Ok(false),
        Some(other) => Err(ApiError::bad_request(format!("{key}: expected true or false, found {other:?}"))),
    }
}

fn filter_from(pairs: &[(String, String)]) -> Result<PatchFilter, ApiError> {
    let mut types = std::collections::BTreeSet::new();
    for (_, v) in pairs.iter().filter(|(k, _)| k == "type") {
        for t in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            types.insert(t.parse::<PatchType>().map_err(|e| ApiError::bad_request(format!("type: {e}")))?);
        }
    }
    let filter = PatchFilter {
        dataset: iri_param(pairs, "dataset")?,
        status: parse_param(pairs, "status")?,
        types: (!types.is_empty()).then_some(types),
        min_advocates: parse_param(pairs, "minAdvocates")?,
        target_subject: iri_param(pairs, "subject")?,
        order: parse_param(pairs, "order")?.unwrap_or_default(),
        limit: parse_param(pairs, "limit")?,
        offset: parse_param(pairs, "offset")?.unwrap_or(0),
    };
    filter.validate()?;
    Ok(filter)
}

/// A path segment naming a patch: a full IRI, or the local part of a minted
/// IRI (`7` for `<base>patch/7`).
fn resolve_patch_id(state: &AppState, segment: &str) -> Result<Iri, ApiError> {
    if let Ok(iri) = Iri::new(segment) {
        return Ok(iri);
    }
    Iri::new(format!("{}patch/{segment}", with_slash(&state.config.repo_base)))
        .map_err(|e| ApiError::bad_request(format!("patch id {segment:?}: {e}")))
}

// -------------------------------------------------------------- handlers

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SubmitResponse {
    patch_id: Iri,
    merged: bool,
}

fn submitted(outcome: SubmitOutcome) -> Response {
    let status = if outcome.merged { StatusCode::OK } else { StatusCode::CREATED };
    let location = HeaderValue::from_str(outcome.patch_id.as_str()).expect("IRIs are valid header values");
    (
        status,
        [(LOCATION, location)],
        Json(SubmitResponse {
            patch_id: outcome.patch_id,
            merged: outcome.merged,
        }),
    )
        .into_response()
}

/// The `agent` parameter, else the first provenance actor, else the first
/// listed advocate.
fn submitter_of(pairs: &[(String, String)], body: &PatchBody) -> Result<Iri, ApiError> {
    if let Some(agent) = iri_param(pairs, "agent")? {
        return Ok(agent);
    }
    body.provenance
        .iter()
        .find_map(|e| e.involved_actor.clone())
        .or_else(|| body.advocates.iter().next().cloned())
        .ok_or_else(|| {
            ApiError::bad_request("no submitter: pass ?agent=<iri> or name an involved actor or advocate")
                .with_code("MissingSubmitter")
        })
}

impl ApiError {
    fn with_code(mut self, code: &str) -> Self {
        self.error = code.into();
        self
    }
}

async fn submit_patch(
    State(state): State<AppState>,
    RawQuery(query): RawQuery,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let pairs = query_pairs(query);
    let media = media_type(&headers).unwrap_or_default();
    let candidate: PatchBody = if is_turtle(&media) {
        let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
        let mut patches = patch_from_turtle(text)?;
        if patches.len() != 1 {
            return Err(ApiError::bad_request(format!("expected one pro:Patch, found {}", patches.len()))
                .with_code("ExpectedOnePatch"));
        }
        patches.remove(0).body
    } else if is_json(&media) {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("invalid JSON patch: {e}")))?
    } else {
        return Err(ApiError::unsupported_media_type(&media));
    };
    let submitter = submitter_of(&pairs, &candidate)?;
    let outcome = state.repo.submit(candidate, submitter).await?;
    Ok(submitted(outcome))
}

async fn list_patches(
    State(state): State<AppState>,
    RawQuery(query): RawQuery,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let filter = filter_from(&query_pairs(query))?;
    let snapshot = state.repo.snapshot();
    let patches = query_patches(&snapshot, &filter)?;
    Ok(patches_response(&headers, &patches, &state.prefixes))
}

fn one_patch(state: &AppState, headers: &HeaderMap, id: &Iri) -> Result<Response, ApiError> {
    let snapshot = state.repo.snapshot();
    let patch = snapshot
        .patch(id)
        .ok_or_else(|| ApiError::from(patchr_core::RepositoryError::UnknownPatch(id.clone())))?;
    if wants_turtle(headers) {
        Ok(patches_response(headers, &[patch], &state.prefixes))
    } else {
        Ok(Json(patch).into_response())
    }
}

async fn get_patch(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let id = resolve_patch_id(&state, &id)?;
    one_patch(&state, &headers, &id)
}

async fn get_minted_patch(
    State(state): State<AppState>,
    Path(n): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let id = Iri::new(format!("{}patch/{n}", with_slash(&state.config.repo_base)))
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    one_patch(&state, &headers, &id)
}

fn current_patch_json(state: &AppState, id: &Iri) -> Response {
    let snapshot = state.repo.snapshot();
    match snapshot.patch(id) {
        Some(p) => Json(p).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    }
}

#[derive(Deserialize)]
struct VoteRequest {
    agent: Iri,
    position: VotePosition,
}

async fn cast_vote(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = resolve_patch_id(&state, &id)?;
    let req: VoteRequest = json_body(&headers, &body)?;
    state.repo.vote(id.clone(), req.agent, req.position).await?;
    Ok(current_patch_json(&state, &id))
}

#[derive(Deserialize)]
struct StatusRequest {
    status: PatchStatus,
    agent: Iri,
}

async fn change_status(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = resolve_patch_id(&state, &id)?;
    let req: StatusRequest = json_body(&headers, &body)?;
    state.repo.change_status(id.clone(), req.status, req.agent).await?;
    Ok(current_patch_json(&state, &id))
}

async fn patch_sparql(
    State(state): State<AppState>,
    Path(id): Path<String>,
    RawQuery(query): RawQuery,
) -> Result<Response, ApiError> {
    let pairs = query_pairs(query);
    let id = resolve_patch_id(&state, &id)?;
    let dialect: SparqlDialect = parse_param(&pairs, "dialect")?.unwrap_or_default();
    let header = parse_flag(&pairs, "prefixes", false)?;
    let snapshot = state.repo.snapshot();
    let patch = snapshot
        .patch(&id)
        .ok_or_else(|| ApiError::from(patchr_core::RepositoryError::UnknownPatch(id.clone())))?;
    let text = to_sparql(patch, dialect, &state.prefixes, header)?;
    Ok(([(CONTENT_TYPE, SPARQL_UPDATE)], text).into_response())
}

#[derive(Serialize)]
struct DatasetEntry<'a> {
    iri: &'a Iri,
    label: &'a str,
}

async fn list_datasets(State(state): State<AppState>) -> Response {
    let entries: Vec<DatasetEntry> = state
        .config
        .datasets
        .iter()
        .map(|(iri, label)| DatasetEntry { iri, label })
        .collect();
    Json(entries).into_response()
}

/// The update script for one dataset. Only active patches are included
/// unless `status` says otherwise (`status=any` lifts the restriction).
async fn dataset_updates(
    State(state): State<AppState>,
    Path(iri): Path<String>,
    RawQuery(query): RawQuery,
) -> Result<Response, ApiError> {
    let mut pairs = query_pairs(query);
    let dataset = Iri::new(iri).map_err(|e| ApiError::bad_request(format!("dataset: {e}")))?;
    let status = match param(&pairs, "status") {
        None => Some(PatchStatus::Active),
        Some("any") => None,
        Some(s) => Some(s.parse().map_err(|e: String| ApiError::bad_request(format!("status: {e}")))?),
    };
    pairs.retain(|(k, _)| k != "status" && k != "dataset");
    let dialect: SparqlDialect = parse_param(&pairs, "dialect")?.unwrap_or_default();
    let header = parse_flag(&pairs, "prefixes", true)?;
    let mut filter = filter_from(&pairs)?;
    filter.dataset = Some(dataset);
    filter.status = status;
    if param(&pairs, "order").is_none() {
        filter.order = PatchOrder::MostPopular;
    }
    let snapshot = state.repo.snapshot();
    let script = export_updates(&snapshot, &filter, dialect, &state.prefixes, header)?;
    Ok((
        [
            (CONTENT_TYPE, HeaderValue::from_static(SPARQL_UPDATE)),
            (CONTENT_DISPOSITION, HeaderValue::from_static("attachment; filename=\"updates.ru\"")),
        ],
        script,
    )
        .into_response())
}

async fn get_report(
    State(state): State<AppState>,
    Path(kind): Path<String>,
    RawQuery(query): RawQuery,
) -> Result<Response, ApiError> {
    let pairs = query_pairs(query);
    let order: PatchOrder = kind
        .parse()
        .map_err(|e: String| ApiError::new(StatusCode::NOT_FOUND, "UnknownReport", e))?;
    let limit = parse_param(&pairs, "limit")?.unwrap_or(10);
    let snapshot = state.repo.snapshot();
    Ok(Json(report(&snapshot, order, limit)?).into_response())
}

async fn entities(
    State(state): State<AppState>,
    RawQuery(query): RawQuery,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let pairs = query_pairs(query);
    let subject = iri_param(&pairs, "subject")?.ok_or_else(|| ApiError::bad_request("subject is required"))?;
    let snapshot = state.repo.snapshot();
    let patches = entity_report(&snapshot, &subject);
    Ok(patches_response(&headers, &patches, &state.prefixes))
}

async fn snapshot(State(state): State<AppState>) -> Result<Response, ApiError> {
    let snapshot = state.repo.snapshot();
    let prefixes = state.prefixes.clone();
    let text = tokio::task::spawn_blocking(move || snapshot_turtle(&snapshot, &prefixes))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?;
    Ok(turtle_response(text))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct FeedbackRequest {
    context: QuestionContext,
    vote: FeedbackVote,
    #[serde(default)]
    service_agent: Option<Iri>,
}

async fn submit_feedback(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: FeedbackRequest = json_body(&headers, &body)?;
    let service = req.service_agent.unwrap_or_else(|| state.config.service_agent.clone());
    let candidate = patch_from_feedback(&req.context, &req.vote, &service)?;
    let outcome = state.repo.submit(candidate, req.vote.actor.clone()).await?;
    Ok(submitted(outcome))
}

async fn list_groups(State(state): State<AppState>) -> Response {
    let snapshot = state.repo.snapshot();
    let groups: Vec<&PatchGroup> = snapshot.groups().collect();
    Json(groups).into_response()
}

async fn create_group(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let group: PatchGroup = json_body(&headers, &body)?;
    let location = HeaderValue::from_str(group.id.as_str()).expect("IRIs are valid header values");
    state.repo.create_group(group.clone()).await?;
    Ok((StatusCode::CREATED, [(LOCATION, location)], Json(group)).into_response())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct AssignRequest {
    group_id: Iri,
}

async fn assign_group(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let id = resolve_patch_id(&state, &id)?;
    let req: AssignRequest = json_body(&headers, &body)?;
    state.repo.assign_group(id.clone(), req.group_id).await?;
    Ok(current_patch_json(&state, &id))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn accept(v: &str) -> HeaderMap {
        let mut h = HeaderMap::new();
        h.insert(ACCEPT, HeaderValue::from_str(v).unwrap());
        h
    }

    #[test]
    fn accept_ranking() {
        assert!(wants_turtle(&accept("text/turtle")));
        assert!(wants_turtle(&accept("application/json;q=0.5, text/turtle")));
        assert!(!wants_turtle(&accept("text/turtle;q=0.2, */*")));
        assert!(!wants_turtle(&accept("application/json")));
        assert!(!wants_turtle(&HeaderMap::new()));
    }
}

//! HTTP routes over an immutable loaded store.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::json;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

use semtrail::store::ModelStore;

use crate::query::{self, ApiResponse, QueryError, Scale};

type Params = Query<HashMap<String, String>>;
type Store = State<Arc<ModelStore>>;

/// Error body naming the offending word or corpus.
pub struct ApiError(pub QueryError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let e = &self.0;
        let (status, body) = match e {
            QueryError::UnknownWord(w) => (StatusCode::NOT_FOUND, json!({"error": e.kind(), "word": w, "message": e.to_string()})),
            QueryError::UnknownCorpus(c) => (StatusCode::NOT_FOUND, json!({"error": e.kind(), "corpus": c, "message": e.to_string()})),
            QueryError::BadRequest(_) => (StatusCode::BAD_REQUEST, json!({"error": e.kind(), "message": e.to_string()})),
            QueryError::Internal(_) => (StatusCode::INTERNAL_SERVER_ERROR, json!({"error": e.kind(), "message": e.to_string()})),
        };
        (status, Json(body)).into_response()
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        ApiError(e)
    }
}

type ApiResult = Result<Json<ApiResponse>, ApiError>;

fn required<'a>(p: &'a HashMap<String, String>, name: &str) -> Result<&'a str, ApiError> {
    p.get(name)
        .map(String::as_str)
        .ok_or_else(|| ApiError(QueryError::BadRequest(format!("missing parameter {name}"))))
}

fn optional_k(p: &HashMap<String, String>) -> Result<Option<usize>, ApiError> {
    p.get("k")
        .map(|k| {
            k.parse()
                .map_err(|_| ApiError(QueryError::BadRequest(format!("k must be a positive integer, got {k:?}"))))
        })
        .transpose()
}

async fn corpora(State(store): Store) -> Json<Vec<query::CorpusSummary>> {
    Json(query::corpora(&store))
}

async fn similarity(State(store): Store, Query(p): Params) -> ApiResult {
    let corpus = required(&p, "corpus")?;
    Ok(Json(query::similarity(&store, corpus, required(&p, "word1")?, required(&p, "word2")?)?))
}

async fn emotion(State(store): Store, Query(p): Params) -> ApiResult {
    let scale = match p.get("scale") {
        Some(s) => Scale::parse(s)?,
        None => Scale::Raw,
    };
    Ok(Json(query::emotion(&store, required(&p, "corpus")?, required(&p, "word")?, scale)?))
}

async fn frequency(State(store): Store, Query(p): Params) -> ApiResult {
    Ok(Json(query::frequency(&store, required(&p, "corpus")?, required(&p, "word")?)?))
}

async fn typical_context(State(store): Store, Query(p): Params) -> ApiResult {
    let k = optional_k(&p)?;
    Ok(Json(query::typical_context(&store, required(&p, "corpus")?, required(&p, "word")?, k)?))
}

async fn most_similar(State(store): Store, Query(p): Params) -> ApiResult {
    let k = optional_k(&p)?;
    Ok(Json(query::most_similar(&store, required(&p, "corpus")?, required(&p, "word")?, k)?))
}

pub fn router(store: Arc<ModelStore>, static_dir: Option<PathBuf>) -> Router {
    let cors = CorsLayer::new().allow_origin(Any).allow_methods([Method::GET]);
    let api = Router::new()
        .route("/api/corpora", get(corpora))
        .route("/api/similarity", get(similarity))
        .route("/api/emotion", get(emotion))
        .route("/api/frequency", get(frequency))
        .route("/api/typicalcontext", get(typical_context))
        .route("/api/mostsimilar", get(most_similar))
        .with_state(store)
        .layer(cors);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

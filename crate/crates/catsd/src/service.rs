//! HTTP API over a flat-file project store.
//!
//! Every project lives in `<data-dir>/projects/<id>/`: `project.json` holds the
//! metadata and the data modules in their JSON mirror form, and `extras/` holds
//! unrecognized bundle files. Writes to an existing project need an `If-Match`
//! header carrying the current version token (the `ETag` of the last response).

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequest, Path as UrlPath, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use catsd_core::engine::AssignmentReport;
use catsd_core::{classify, ClassifyOptions, IssueCode, ValidationReport, WeightElicitation};
use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bundle::{decode_unvalidated, encode, write_atomic, Bundle, Dataset, Manifest, Module, FORMAT_VERSION};
use crate::elicit::{compute_deck, compute_srf, fit_thresholds, DeckRequest, ElicitError, FitRequest};
use crate::table::Format;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoredProject {
    pub id: String,
    pub name: String,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub version: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dummy_category_name: Option<String>,
    pub modules: BTreeMap<Module, Value>,
    #[serde(default)]
    pub last_results: Option<AssignmentReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectSummary {
    pub id: String,
    pub name: String,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub version: u64,
}

impl StoredProject {
    fn summary(&self) -> ProjectSummary {
        ProjectSummary {
            id: self.id.clone(),
            name: self.name.clone(),
            created_at: self.created_at,
            updated_at: self.updated_at,
            version: self.version,
        }
    }

    fn etag(&self) -> String {
        format!("\"{}\"", self.version)
    }
}

fn storage_error(e: impl std::fmt::Display) -> ApiError {
    ApiError::simple(StatusCode::INTERNAL_SERVER_ERROR, "STORAGE_ERROR", e.to_string())
}

/// Single-writer store; one lock serializes every read-modify-write.
pub struct Store {
    root: PathBuf,
    lock: Mutex<()>,
}

impl Store {
    pub fn open(root: &Path) -> io::Result<Store> {
        fs::create_dir_all(root.join("projects"))?;
        Ok(Store {
            root: root.to_owned(),
            lock: Mutex::new(()),
        })
    }

    fn dir(&self, id: &str) -> Option<PathBuf> {
        let safe = !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-');
        safe.then(|| self.root.join("projects").join(id))
    }

    fn load(&self, id: &str) -> Result<StoredProject, ApiError> {
        let not_found = || ApiError::simple(StatusCode::NOT_FOUND, "NOT_FOUND", format!("no project `{id}`"));
        let dir = self.dir(id).ok_or_else(not_found)?;
        let bytes = match fs::read(dir.join("project.json")) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(not_found()),
            Err(e) => return Err(storage_error(e)),
        };
        serde_json::from_slice(&bytes).map_err(storage_error)
    }

    fn save(&self, p: &StoredProject) -> Result<(), ApiError> {
        let dir = self.dir(&p.id).expect("generated ids are safe");
        let bytes = serde_json::to_vec_pretty(p).map_err(storage_error)?;
        write_atomic(&dir.join("project.json"), &bytes).map_err(storage_error)
    }

    fn extras(&self, id: &str) -> Result<BTreeMap<String, Vec<u8>>, ApiError> {
        let dir = self.dir(id).expect("checked by load").join("extras");
        if !dir.is_dir() {
            return Ok(BTreeMap::new());
        }
        Bundle::read_dir(&dir).map(|b| b.files).map_err(storage_error)
    }

    fn put_extras(&self, id: &str, extras: &BTreeMap<String, Vec<u8>>) -> Result<(), ApiError> {
        let dir = self.dir(id).expect("generated ids are safe").join("extras");
        for (name, data) in extras {
            write_atomic(&dir.join(name), data).map_err(storage_error)?;
        }
        Ok(())
    }

    fn list(&self) -> Result<Vec<ProjectSummary>, ApiError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("projects")).map_err(storage_error)? {
            let entry = entry.map_err(storage_error)?;
            let id = entry.file_name().to_string_lossy().into_owned();
            if let Ok(p) = self.load(&id) {
                out.push(p.summary());
            }
        }
        out.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));
        Ok(out)
    }

    fn bundle(&self, p: &StoredProject) -> Result<Bundle, ApiError> {
        let mut files = self.extras(&p.id)?;
        let mut modules = BTreeMap::new();
        for (m, doc) in &p.modules {
            let name = m.file_name(Format::Json);
            files.insert(name.clone(), serde_json::to_vec(doc).map_err(storage_error)?);
            modules.insert(*m, name);
        }
        let manifest = Manifest {
            format_version: FORMAT_VERSION,
            modules,
            dummy_category_name: p.dummy_category_name.clone(),
        };
        Ok(Bundle {
            manifest: Some(manifest),
            files,
        })
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn simple(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({"code": code, "message": message.into()}),
        }
    }

    fn report(status: StatusCode, report: &ValidationReport) -> Self {
        ApiError {
            status,
            body: serde_json::to_value(report).expect("serializable"),
        }
    }

    fn elicit(e: ElicitError) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: serde_json::to_value(e).expect("serializable"),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// JSON body whose rejections come back as a 400 validation report.
pub struct Body<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        match Json::<T>::from_request(req, state).await {
            Ok(Json(v)) => Ok(Body(v)),
            Err(e) => {
                let message = match &e {
                    JsonRejection::JsonDataError(d) => d.body_text(),
                    other => other.body_text(),
                };
                let mut r = ValidationReport::default();
                r.push(IssueCode::BadValue, "body", message);
                Err(ApiError::report(StatusCode::BAD_REQUEST, &r))
            }
        }
    }
}

fn optional_body<T: DeserializeOwned + Default>(bytes: &[u8]) -> Result<T, ApiError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| {
        let mut r = ValidationReport::default();
        r.push(IssueCode::BadValue, "body", e.to_string());
        ApiError::report(StatusCode::BAD_REQUEST, &r)
    })
}

fn structural(code: IssueCode) -> bool {
    matches!(
        code,
        IssueCode::MissingColumn | IssueCode::BadValue | IssueCode::UnknownReference | IssueCode::UnsupportedFormat
    )
}

/// Outcome of checking a candidate project state.
struct Assessment {
    dataset: Option<Dataset>,
    warnings: ValidationReport,
}

/// Structural issues reject with 400, method-level ones with 422; the rest are warnings.
fn assess(bundle: &Bundle) -> Result<Assessment, ApiError> {
    let (dataset, mut report) = decode_unvalidated(bundle);
    if let Some(d) = &dataset {
        if report.issues.iter().all(|i| !structural(i.code)) {
            report.extend(catsd_core::validate_model(&d.model));
            report.extend(catsd_core::validate_performances(&d.model, &d.actions, &d.performances));
        }
    }
    let (bad, rest): (Vec<_>, Vec<_>) = report.issues.into_iter().partition(|i| structural(i.code));
    if !bad.is_empty() {
        return Err(ApiError::report(
            StatusCode::BAD_REQUEST,
            &ValidationReport { issues: bad },
        ));
    }
    let (semantic, warnings): (Vec<_>, Vec<_>) = rest.into_iter().partition(|i| i.code.is_semantic());
    if !semantic.is_empty() {
        return Err(ApiError::report(
            StatusCode::UNPROCESSABLE_ENTITY,
            &ValidationReport { issues: semantic },
        ));
    }
    Ok(Assessment {
        dataset,
        warnings: ValidationReport { issues: warnings },
    })
}

fn if_match(headers: &HeaderMap, p: &StoredProject, required: bool) -> Result<(), ApiError> {
    let Some(value) = headers.get(header::IF_MATCH) else {
        if required {
            return Err(ApiError::simple(
                StatusCode::PRECONDITION_REQUIRED,
                "VERSION_REQUIRED",
                format!("send If-Match with the current version token {}", p.etag()),
            ));
        }
        return Ok(());
    };
    let text = value.to_str().unwrap_or("");
    let matches = text
        .split(',')
        .map(|t| t.trim().trim_start_matches("W/"))
        .any(|t| t == "*" || t == p.etag());
    if matches {
        Ok(())
    } else {
        Err(ApiError::simple(
            StatusCode::CONFLICT,
            "VERSION_CONFLICT",
            format!("project `{}` is at version {}, not {text}", p.id, p.etag()),
        ))
    }
}

fn with_etag(p: &StoredProject, status: StatusCode, body: Value) -> Response {
    let mut resp = (status, Json(body)).into_response();
    resp.headers_mut()
        .insert(header::ETAG, HeaderValue::from_str(&p.etag()).expect("ascii"));
    resp
}

fn project_body(p: &StoredProject, warnings: Option<&ValidationReport>) -> Value {
    let mut v = serde_json::to_value(p).expect("serializable");
    if let Some(w) = warnings {
        v["warnings"] = serde_json::to_value(&w.issues).expect("serializable");
    }
    v
}

type AppState = Arc<Store>;

#[derive(Debug, Default, Deserialize)]
struct NewProject {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    dummy_category_name: Option<String>,
    #[serde(default)]
    modules: BTreeMap<String, Value>,
}

fn parse_modules(raw: BTreeMap<String, Value>) -> Result<BTreeMap<Module, Value>, ApiError> {
    raw.into_iter()
        .map(|(k, v)| {
            Module::from_name(&k).map(|m| (m, v)).ok_or_else(|| {
                ApiError::simple(StatusCode::NOT_FOUND, "UNKNOWN_MODULE", format!("no data module `{k}`"))
            })
        })
        .collect()
}

fn fresh(name: String, dummy: Option<String>, modules: BTreeMap<Module, Value>) -> StoredProject {
    let now = Utc::now();
    StoredProject {
        id: uuid::Uuid::new_v4().simple().to_string(),
        name,
        created_at: now,
        updated_at: now,
        version: 1,
        dummy_category_name: dummy,
        modules,
        last_results: None,
    }
}

async fn create_project(State(store): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: NewProject = optional_body(&body)?;
    let modules = parse_modules(req.modules)?;
    let p = fresh(
        req.name.unwrap_or_else(|| "Untitled project".into()),
        req.dummy_category_name,
        modules,
    );
    let _guard = store.lock.lock().expect("store lock");
    let a = assess(&store.bundle(&p)?)?;
    store.save(&p)?;
    Ok(with_etag(&p, StatusCode::CREATED, project_body(&p, Some(&a.warnings))))
}

async fn list_projects(State(store): State<AppState>) -> Result<Json<Vec<ProjectSummary>>, ApiError> {
    Ok(Json(store.list()?))
}

async fn get_project(State(store): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let p = store.load(&id)?;
    Ok(with_etag(&p, StatusCode::OK, project_body(&p, None)))
}

async fn delete_project(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
) -> Result<StatusCode, ApiError> {
    let _guard = store.lock.lock().expect("store lock");
    let p = store.load(&id)?;
    if_match(&headers, &p, false)?;
    fs::remove_dir_all(store.dir(&id).expect("checked by load")).map_err(storage_error)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn duplicate_project(State(store): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let _guard = store.lock.lock().expect("store lock");
    let src = store.load(&id)?;
    let mut p = fresh(
        format!("{} (copy)", src.name),
        src.dummy_category_name.clone(),
        src.modules.clone(),
    );
    p.last_results = src.last_results.clone();
    store.save(&p)?;
    store.put_extras(&p.id, &store.extras(&src.id)?)?;
    Ok(with_etag(&p, StatusCode::CREATED, project_body(&p, None)))
}

async fn put_module(
    State(store): State<AppState>,
    UrlPath((id, module)): UrlPath<(String, String)>,
    headers: HeaderMap,
    Body(doc): Body<Value>,
) -> Result<Response, ApiError> {
    let module = Module::from_name(&module).ok_or_else(|| {
        ApiError::simple(
            StatusCode::NOT_FOUND,
            "UNKNOWN_MODULE",
            format!("no data module `{module}`"),
        )
    })?;
    let _guard = store.lock.lock().expect("store lock");
    let mut p = store.load(&id)?;
    if_match(&headers, &p, true)?;
    p.modules.insert(module, doc);
    let a = assess(&store.bundle(&p)?)?;
    p.version += 1;
    p.updated_at = Utc::now().max(p.created_at);
    store.save(&p)?;
    Ok(with_etag(
        &p,
        StatusCode::OK,
        json!({"version": p.version, "warnings": a.warnings.issues}),
    ))
}

async fn execute_project(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> Result<Json<AssignmentReport>, ApiError> {
    let options: ClassifyOptions = optional_body(&body)?;
    let (p, bundle) = {
        let _guard = store.lock.lock().expect("store lock");
        let p = store.load(&id)?;
        let b = store.bundle(&p)?;
        (p, b)
    };
    let a = assess(&bundle)?;
    let blocking: Vec<_> = a.warnings.issues.clone();
    let Some(data) = a.dataset.filter(|_| blocking.is_empty()) else {
        return Err(ApiError::report(StatusCode::BAD_REQUEST, &a.warnings));
    };
    let report = classify(&data.model, &data.actions, &data.performances, options).map_err(|e| match e.report() {
        Some(r) => ApiError::report(StatusCode::BAD_REQUEST, r),
        None => ApiError::simple(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string()),
    })?;
    let _guard = store.lock.lock().expect("store lock");
    if let Ok(mut current) = store.load(&id) {
        if current.version == p.version {
            current.last_results = Some(report.clone());
            store.save(&current)?;
        }
    }
    Ok(Json(report))
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    #[serde(default)]
    format: Option<String>,
}

async fn export_project(
    State(store): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<ExportQuery>,
) -> Result<Response, ApiError> {
    let format = match q.format.as_deref() {
        None | Some("csv") => Format::Csv,
        Some("json") => Format::Json,
        Some(other) => {
            return Err(ApiError::simple(
                StatusCode::BAD_REQUEST,
                "BAD_VALUE",
                format!("unknown format `{other}`"),
            ))
        }
    };
    let (p, bundle) = {
        let _guard = store.lock.lock().expect("store lock");
        let p = store.load(&id)?;
        let b = store.bundle(&p)?;
        (p, b)
    };
    let (dataset, report) = decode_unvalidated(&bundle);
    let Some(dataset) = dataset else {
        return Err(ApiError::report(StatusCode::BAD_REQUEST, &report));
    };
    let zip = encode(&dataset, format, &bundle.extras()).to_zip();
    let disposition = format!("attachment; filename=\"{}.zip\"", p.id);
    Ok((
        [
            (header::CONTENT_TYPE, HeaderValue::from_static("application/zip")),
            (
                header::CONTENT_DISPOSITION,
                HeaderValue::from_str(&disposition).expect("ascii"),
            ),
            (header::ETAG, HeaderValue::from_str(&p.etag()).expect("ascii")),
        ],
        zip,
    )
        .into_response())
}

#[derive(Debug, Deserialize)]
struct ImportQuery {
    #[serde(default)]
    name: Option<String>,
}

async fn import_project(
    State(store): State<AppState>,
    Query(q): Query<ImportQuery>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let bundle = Bundle::from_zip(&body).map_err(|m| {
        let mut r = ValidationReport::default();
        r.push(
            IssueCode::UnsupportedFormat,
            "body",
            format!("not a bundle archive: {m}"),
        );
        ApiError::report(StatusCode::BAD_REQUEST, &r)
    })?;
    let a = assess(&bundle)?;
    let data = a.dataset.expect("assess succeeded");
    let extras = bundle.extras();
    let canonical = encode(&data, Format::Json, &BTreeMap::new());
    let mut modules = BTreeMap::new();
    let present = bundle.effective_manifest().modules;
    for m in present.keys() {
        let bytes = &canonical.files[&m.file_name(Format::Json)];
        modules.insert(*m, serde_json::from_slice(bytes).map_err(storage_error)?);
    }
    let name = q.name.unwrap_or_else(|| "Imported project".into());
    let p = fresh(name, Some(data.model.dummy_category_name.clone()), modules);
    let _guard = store.lock.lock().expect("store lock");
    store.save(&p)?;
    store.put_extras(&p.id, &extras)?;
    Ok(with_etag(&p, StatusCode::CREATED, project_body(&p, Some(&a.warnings))))
}

async fn srf_weights(Body(req): Body<WeightElicitation>) -> Result<Json<Value>, ApiError> {
    let w = compute_srf(&req).map_err(ApiError::elicit)?;
    Ok(Json(serde_json::to_value(w).expect("serializable")))
}

async fn deck_intensities(Body(req): Body<DeckRequest>) -> Result<Json<Value>, ApiError> {
    let d = compute_deck(&req).map_err(ApiError::elicit)?;
    Ok(Json(serde_json::to_value(d).expect("serializable")))
}

async fn fit(Body(req): Body<FitRequest>) -> Result<Json<Value>, ApiError> {
    let f = fit_thresholds(&req).map_err(ApiError::elicit)?;
    Ok(Json(serde_json::to_value(f).expect("serializable")))
}

async fn openapi() -> Json<Value> {
    Json(openapi_document())
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/projects", post(create_project).get(list_projects))
        .route("/projects/import", post(import_project))
        .route("/projects/{id}", get(get_project).delete(delete_project))
        .route("/projects/{id}/duplicate", post(duplicate_project))
        .route("/projects/{id}/modules/{module}", put(put_module))
        .route("/projects/{id}/execute", post(execute_project))
        .route("/projects/{id}/export", get(export_project))
        .route("/compute/srf-weights", post(srf_weights))
        .route("/compute/fit-thresholds", post(fit))
        .route("/compute/deck-intensities", post(deck_intensities))
        .route("/spec", get(openapi))
        .with_state(store)
}

/// Blocks until interrupted.
pub fn serve(addr: &str, data_dir: &Path) -> io::Result<()> {
    let store = Arc::new(Store::open(data_dir)?);
    let addr: SocketAddr = addr
        .parse()
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, format!("{addr}: {e}")))?;
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(store))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    })
}

pub fn openapi_document() -> Value {
    let report = json!({"$ref": "#/components/schemas/ValidationReport"});
    let error = json!({"$ref": "#/components/schemas/Error"});
    let project_id = json!({"name": "id", "in": "path", "required": true, "schema": {"type": "string"}});
    let if_match = json!({"name": "If-Match", "in": "header", "required": true, "schema": {"type": "string"},
        "description": "Current version token, as returned in ETag"});
    let json_body = |schema: Value| json!({"required": true, "content": {"application/json": {"schema": schema}}});
    let ok = |description: &str, schema: Value| json!({"description": description, "content": {"application/json": {"schema": schema}}});
    let modules: Vec<&str> = Module::ALL.iter().map(|m| m.name()).collect();
    json!({
        "openapi": "3.0.3",
        "info": {"title": "catsd", "version": env!("CARGO_PKG_VERSION"),
                 "description": "Project workspace and elicitation helpers for nominal classification."},
        "paths": {
            "/projects": {
                "get": {"summary": "List projects", "responses": {"200": ok("Project summaries", json!({"type": "array", "items": {"$ref": "#/components/schemas/ProjectSummary"}}))}},
                "post": {"summary": "Create a project", "requestBody": json_body(json!({"$ref": "#/components/schemas/NewProject"})),
                         "responses": {"201": ok("Created", json!({"$ref": "#/components/schemas/Project"})), "400": ok("Invalid data", report.clone()), "422": ok("Invalid parameters", report.clone())}}
            },
            "/projects/import": {
                "post": {"summary": "Import a bundle archive as a new project",
                         "parameters": [{"name": "name", "in": "query", "schema": {"type": "string"}}],
                         "requestBody": {"required": true, "content": {"application/zip": {"schema": {"type": "string", "format": "binary"}}}},
                         "responses": {"201": ok("Created", json!({"$ref": "#/components/schemas/Project"})), "400": ok("Invalid bundle", report.clone()), "422": ok("Invalid parameters", report.clone())}}
            },
            "/projects/{id}": {
                "get": {"summary": "Fetch a project", "parameters": [project_id.clone()],
                        "responses": {"200": ok("Project", json!({"$ref": "#/components/schemas/Project"})), "404": ok("Unknown id", error.clone())}},
                "delete": {"summary": "Delete a project", "parameters": [project_id.clone()],
                           "responses": {"204": {"description": "Deleted"}, "404": ok("Unknown id", error.clone()), "409": ok("Stale version token", error.clone())}}
            },
            "/projects/{id}/duplicate": {
                "post": {"summary": "Copy a project", "parameters": [project_id.clone()],
                         "responses": {"201": ok("Created", json!({"$ref": "#/components/schemas/Project"})), "404": ok("Unknown id", error.clone())}}
            },
            "/projects/{id}/modules/{module}": {
                "put": {"summary": "Replace one data module (JSON mirror: an array of row objects)",
                        "parameters": [project_id.clone(), {"name": "module", "in": "path", "required": true, "schema": {"type": "string", "enum": modules}}, if_match],
                        "requestBody": json_body(json!({"type": "array", "items": {"type": "object"}})),
                        "responses": {"200": ok("Stored; warnings list remaining gaps", json!({"type": "object"})),
                                      "400": ok("Invalid data", report.clone()), "404": ok("Unknown id or module", error.clone()),
                                      "409": ok("Stale version token", error.clone()), "422": ok("Invalid parameters", report.clone()),
                                      "428": ok("Missing If-Match", error.clone())}}
            },
            "/projects/{id}/execute": {
                "post": {"summary": "Classify the project's actions", "parameters": [project_id.clone()],
                         "requestBody": {"required": false, "content": {"application/json": {"schema": {"type": "object", "properties": {"epsilon": {"type": "number"}}}}}},
                         "responses": {"200": ok("Assignment report with traces", json!({"type": "object"})), "400": ok("Incomplete or invalid model", report.clone()),
                                       "404": ok("Unknown id", error.clone()), "422": ok("Invalid parameters", report.clone())}}
            },
            "/projects/{id}/export": {
                "get": {"summary": "Download the project as a bundle archive",
                        "parameters": [project_id, {"name": "format", "in": "query", "schema": {"type": "string", "enum": ["csv", "json"]}}],
                        "responses": {"200": {"description": "Archive", "content": {"application/zip": {"schema": {"type": "string", "format": "binary"}}}}, "404": ok("Unknown id", error.clone())}}
            },
            "/compute/srf-weights": {
                "post": {"summary": "Weights from a deck-of-cards ranking",
                         "requestBody": json_body(json!({"type": "object", "required": ["ranking", "z"],
                             "properties": {"ranking": {"$ref": "#/components/schemas/Ranking"}, "z": {"$ref": "#/components/schemas/Exact"}}})),
                         "responses": {"200": ok("Weights", json!({"type": "object"})), "400": ok("Malformed body", report.clone()), "422": ok("Invalid ranking", error.clone())}}
            },
            "/compute/fit-thresholds": {
                "post": {"summary": "Constant or affine thresholds from probe answers",
                         "requestBody": json_body(json!({"type": "object", "required": ["points"], "properties": {"points": {"type": "array", "items": {"type": "object",
                             "properties": {"threshold": {"type": "string", "enum": ["t", "t_prime", "u", "u_prime", "v", "v_prime"]}, "level": {"$ref": "#/components/schemas/Exact"}, "difference": {"$ref": "#/components/schemas/Exact"}}}}}})),
                         "responses": {"200": ok("Fitted thresholds", json!({"type": "object"})), "400": ok("Malformed body", report.clone()), "422": ok("Invalid input", error.clone())}}
            },
            "/compute/deck-intensities": {
                "post": {"summary": "Intensities for one SD-function component",
                         "requestBody": json_body(json!({"type": "object", "required": ["component", "ranking"],
                             "properties": {"component": {"type": "string", "enum": ["f1", "f2", "f3", "f4"]}, "ranking": {"$ref": "#/components/schemas/Ranking"}}})),
                         "responses": {"200": ok("Intensities", json!({"type": "object"})), "400": ok("Malformed body", report), "422": ok("Invalid ranking", error)}}
            },
            "/spec": {"get": {"summary": "This document", "responses": {"200": {"description": "OpenAPI document"}}}}
        },
        "components": {"schemas": {
            "Exact": {"oneOf": [{"type": "number"}, {"type": "string", "example": "2/13"}]},
            "Ranking": {"type": "object", "required": ["subsets"], "properties": {
                "subsets": {"type": "array", "items": {"type": "array", "items": {}}},
                "blanks": {"type": "array", "items": {"type": "integer", "minimum": 0}}}},
            "Issue": {"type": "object", "properties": {"code": {"type": "string"}, "location": {"type": "string"}, "message": {"type": "string"}}},
            "ValidationReport": {"type": "object", "properties": {"issues": {"type": "array", "items": {"$ref": "#/components/schemas/Issue"}}}},
            "Error": {"type": "object", "properties": {"code": {"type": "string"}, "message": {"type": "string"}}},
            "ProjectSummary": {"type": "object", "properties": {"id": {"type": "string"}, "name": {"type": "string"},
                "created_at": {"type": "string", "format": "date-time"}, "updated_at": {"type": "string", "format": "date-time"}, "version": {"type": "integer"}}},
            "NewProject": {"type": "object", "properties": {"name": {"type": "string"}, "dummy_category_name": {"type": "string"},
                "modules": {"type": "object", "additionalProperties": {"type": "array", "items": {"type": "object"}}}}},
            "Project": {"allOf": [{"$ref": "#/components/schemas/ProjectSummary"}, {"type": "object", "properties": {
                "modules": {"type": "object"}, "dummy_category_name": {"type": "string"}, "last_results": {"type": "object", "nullable": true}}}]}
        }}
    })
}

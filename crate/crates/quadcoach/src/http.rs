//! HTTP and WebSocket API over [`SessionService`].

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use quadcoach_core::analysis::SurveyResponse;
use quadcoach_core::sim::SimState;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::formats::rows_to_string;
use crate::frames::InputFrame;
use crate::service::{LiveTrial, ServiceError, SessionService, TrialSummary};
use crate::session::{ExitSurvey, SessionError};

pub const NDJSON: &str = "application/x-ndjson";

/// Body of a whole-trial upload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialUpload {
    pub frames: Vec<InputFrame>,
}

/// Reply to a trial start without frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStarted {
    pub index: u32,
    /// WebSocket path for the trial's input stream.
    pub input: String,
}

/// Messages sent from the server on a trial's input socket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    State { state: SimState },
    Error { message: String },
    Finished { summary: TrialSummary },
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = match &e {
            ServiceError::UnknownSession(_)
            | ServiceError::Session(SessionError::UnknownTrial(_)) => StatusCode::NOT_FOUND,
            ServiceError::Session(SessionError::Rating(_)) | ServiceError::Frame { .. } => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            ServiceError::Session(_) | ServiceError::AlreadyLive(_) => StatusCode::CONFLICT,
            ServiceError::Store(_)
            | ServiceError::Config(_)
            | ServiceError::MissingSpec(_)
            | ServiceError::Task(_) => {
                tracing::error!("{e}");
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(service: SessionService) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/trials", post(post_trial))
        .route("/sessions/{id}/trials/{n}/input", get(trial_input))
        .route("/sessions/{id}/trials/{n}/feedback", get(get_feedback))
        .route("/sessions/{id}/trials/{n}/trajectory", get(get_trajectory))
        .route("/sessions/{id}/trials/{n}/survey", post(post_survey))
        .route("/sessions/{id}/exit-survey", post(post_exit_survey))
        .route("/export", get(export))
        .with_state(service)
}

async fn create_session(State(app): State<SessionService>) -> ApiResult<impl IntoResponse> {
    Ok((StatusCode::CREATED, Json(app.create_session().await?)))
}

async fn get_session(
    State(app): State<SessionService>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(app.session(&id).await?))
}

async fn post_trial(
    State(app): State<SessionService>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Response> {
    if body.iter().all(u8::is_ascii_whitespace) {
        let index = app.start_trial(&id).await?;
        let started = TrialStarted {
            index,
            input: format!("/sessions/{id}/trials/{index}/input"),
        };
        return Ok((StatusCode::ACCEPTED, Json(started)).into_response());
    }
    let upload: TrialUpload =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let summary = app.run_trial(&id, upload.frames).await?;
    Ok((StatusCode::CREATED, Json(summary)).into_response())
}

async fn trial_input(
    State(app): State<SessionService>,
    Path((id, n)): Path<(String, u32)>,
    ws: WebSocketUpgrade,
) -> ApiResult<Response> {
    let live = app.open_live(&id, n).await?;
    Ok(ws.on_upgrade(move |socket| drive_live(socket, live)))
}

async fn send(socket: &mut WebSocket, message: &ServerMessage) -> bool {
    let text = serde_json::to_string(message).expect("server messages serialize");
    socket.send(Message::Text(text.into())).await.is_ok()
}

/// Feeds frames into the trial until it terminates or the client leaves,
/// then runs the trial out on the last input.
async fn drive_live(mut socket: WebSocket, mut live: LiveTrial) {
    let mut connected = true;
    while connected && !live.is_finished() {
        let text = match socket.recv().await {
            Some(Ok(Message::Text(text))) => text,
            Some(Ok(Message::Close(_))) | Some(Err(_)) | None => break,
            Some(Ok(_)) => continue,
        };
        let reply = match serde_json::from_str::<InputFrame>(&text) {
            Ok(frame) => match live.push(&frame) {
                Ok(state) => ServerMessage::State { state },
                Err(e) => ServerMessage::Error {
                    message: e.to_string(),
                },
            },
            Err(e) => ServerMessage::Error {
                message: format!("malformed frame: {e}"),
            },
        };
        connected = send(&mut socket, &reply).await;
    }
    let index = live.index();
    match live.finish().await {
        Ok(summary) => {
            if connected {
                send(&mut socket, &ServerMessage::Finished { summary }).await;
            }
        }
        Err(e) => {
            tracing::error!(trial = index, "finishing live trial failed: {e}");
            if connected {
                send(
                    &mut socket,
                    &ServerMessage::Error {
                        message: e.to_string(),
                    },
                )
                .await;
            }
        }
    }
    if connected {
        let _ = socket.send(Message::Close(None)).await;
    }
}

async fn get_feedback(
    State(app): State<SessionService>,
    Path((id, n)): Path<(String, u32)>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(app.get_feedback(&id, n).await?))
}

async fn get_trajectory(
    State(app): State<SessionService>,
    Path((id, n)): Path<(String, u32)>,
) -> ApiResult<impl IntoResponse> {
    Ok((
        [(header::CONTENT_TYPE, NDJSON)],
        app.trajectory(&id, n).await?,
    ))
}

async fn post_survey(
    State(app): State<SessionService>,
    Path((id, n)): Path<(String, u32)>,
    Json(response): Json<SurveyResponse>,
) -> ApiResult<impl IntoResponse> {
    Ok((
        StatusCode::CREATED,
        Json(app.submit_survey(&id, n, response).await?),
    ))
}

async fn post_exit_survey(
    State(app): State<SessionService>,
    Path(id): Path<String>,
    Json(survey): Json<ExitSurvey>,
) -> ApiResult<impl IntoResponse> {
    app.submit_exit_survey(&id, survey).await?;
    Ok(StatusCode::CREATED)
}

async fn export(State(app): State<SessionService>) -> ApiResult<impl IntoResponse> {
    let rows = app.export_rows().await?;
    Ok(([(header::CONTENT_TYPE, NDJSON)], rows_to_string(&rows)))
}

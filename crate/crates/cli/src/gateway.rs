//! HTTP and WebSocket surface over a [`DriverHandle`].
//!
//! - `GET /state`: the latest [`Snapshot`].
//! - `POST /command`: an [`OperatorCommand`]; `202` once queued, `400` for
//!   a malformed body, `422` when the arena refuses it.
//! - `GET /events?since=N`: WebSocket; one text message per journal record,
//!   starting at record `N` (default 0), exactly as the journal writes it.

use std::io;
use std::net::SocketAddr;

use arena_core::{Arena, ArenaError, OperatorCommand};
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::broadcast::error::RecvError;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

use crate::driver::{Driver, DriverHandle, LoopOptions, SubmitError, API_SCHEMA};

pub fn router(handle: DriverHandle) -> Router {
    Router::new()
        .route("/state", get(state))
        .route("/command", post(command))
        .route("/events", get(events))
        .with_state(handle)
}

async fn state(State(handle): State<DriverHandle>) -> Response {
    Json(&*handle.snapshot()).into_response()
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({"schema": API_SCHEMA, "error": message.into()}))).into_response()
}

async fn command(State(handle): State<DriverHandle>, body: String) -> Response {
    let command: OperatorCommand = match serde_json::from_str(&body) {
        Ok(c) => c,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed command: {e}")),
    };
    match handle.submit(command).await {
        Ok(tick) => (
            StatusCode::ACCEPTED,
            Json(json!({"schema": API_SCHEMA, "accepted": true, "applies_at_tick": tick})),
        )
            .into_response(),
        Err(SubmitError::Rejected(reason)) => error(StatusCode::UNPROCESSABLE_ENTITY, reason),
        Err(SubmitError::Stopped) => error(StatusCode::SERVICE_UNAVAILABLE, "loop has stopped"),
    }
}

#[derive(Debug, Deserialize)]
struct EventsQuery {
    #[serde(default)]
    since: usize,
}

async fn events(
    State(handle): State<DriverHandle>,
    Query(query): Query<EventsQuery>,
    upgrade: WebSocketUpgrade,
) -> Response {
    upgrade.on_upgrade(move |socket| stream_events(socket, handle, query.since))
}

async fn stream_events(mut socket: WebSocket, handle: DriverHandle, since: usize) {
    let (backlog, mut rx) = handle.feed().subscribe(since);
    let mut sent = since;
    for line in backlog {
        if socket.send(Message::Text(line.as_ref().into())).await.is_err() {
            return;
        }
        sent += 1;
    }
    loop {
        tokio::select! {
            next = rx.recv() => match next {
                Ok(line) => {
                    if socket.send(Message::Text(line.as_ref().into())).await.is_err() {
                        return;
                    }
                    sent += 1;
                }
                Err(RecvError::Lagged(_)) => {
                    // the client can reconnect with since=sent
                    let reason = format!("lagged; reconnect with since={sent}");
                    let _ = socket
                        .send(Message::Close(Some(axum::extract::ws::CloseFrame {
                            code: 1008,
                            reason: reason.into(),
                        })))
                        .await;
                    return;
                }
                Err(RecvError::Closed) => {
                    let _ = socket.send(Message::Close(None)).await;
                    return;
                }
            },
            incoming = socket.recv() => match incoming {
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}

/// A gateway serving a loop thread.
pub struct Server {
    addr: SocketAddr,
    driver: Driver,
    stop: oneshot::Sender<()>,
    task: JoinHandle<io::Result<()>>,
}

/// Binds `bind`, starts the loop and serves until [`Server::stop`].
pub async fn start(arena: Arena, options: LoopOptions, bind: SocketAddr) -> io::Result<Server> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    let addr = listener.local_addr()?;
    let driver = Driver::spawn(arena, options);
    let app = router(driver.handle());
    let (stop, stopped) = oneshot::channel::<()>();
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = stopped.await;
            })
            .await
    });
    Ok(Server {
        addr,
        driver,
        stop,
        task,
    })
}

impl Server {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn handle(&self) -> DriverHandle {
        self.driver.handle()
    }

    /// Stops the loop first, so open event streams see the end of the feed,
    /// then the HTTP server.
    pub async fn stop(self) -> Result<Arena, ArenaError> {
        let driver = self.driver;
        let arena = tokio::task::spawn_blocking(move || driver.shutdown())
            .await
            .expect("join loop thread");
        let _ = self.stop.send(());
        let _ = self.task.await;
        arena
    }
}

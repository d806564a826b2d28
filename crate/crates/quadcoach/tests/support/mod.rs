#![allow(dead_code)]

use quadcoach::frames::{frames_for_inputs, InputFrame};
use quadcoach::http::router;
use quadcoach::service::{ServiceBuilder, SessionService};
use quadcoach::store::Store;
use quadcoach_core::sim::{PilotProfile, SimConfig};
use tempfile::TempDir;

pub struct Server {
    pub base: String,
    pub service: SessionService,
    pub client: reqwest::Client,
    pub dir: TempDir,
}

impl Server {
    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub fn ws_url(&self, path: &str) -> String {
        format!("{}{path}", self.base.replacen("http://", "ws://", 1))
    }
}

pub async fn start(configure: impl FnOnce(ServiceBuilder) -> ServiceBuilder) -> Server {
    let dir = tempfile::tempdir().unwrap();
    start_in(dir, configure).await
}

pub async fn start_in(
    dir: TempDir,
    configure: impl FnOnce(ServiceBuilder) -> ServiceBuilder,
) -> Server {
    let store = Store::open(dir.path().join("data")).unwrap();
    let service = configure(SessionService::builder(store)).build().unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let app = router(service.clone());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    Server {
        base,
        service,
        client: reqwest::Client::new(),
        dir,
    }
}

pub fn profile_frames(profile: &PilotProfile) -> Vec<InputFrame> {
    let sim = SimConfig::default();
    frames_for_inputs(&profile.fly(&sim), sim.dt)
}

/// Frames that land safely on the pad.
pub fn safe_frames() -> Vec<InputFrame> {
    profile_frames(&PilotProfile::centered(&SimConfig::default()))
}

/// Frames that touch down left of the pad.
pub fn crash_frames() -> Vec<InputFrame> {
    let sim = SimConfig::default();
    profile_frames(&PilotProfile {
        target_x: 300.0,
        ..PilotProfile::centered(&sim)
    })
}

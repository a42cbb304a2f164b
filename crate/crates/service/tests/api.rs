use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use patchr_core::fixtures::{self, LISTING1_TTL};
use patchr_core::{patch_from_turtle, replay, RepositoryEvent};
use patchr_rdf::{isomorphic, parse_turtle, Iri};
use patchr_service::{router, ApiConfig, RepoHandle};
use serde_json::{json, Value};
use tower::ServiceExt;

fn base() -> Iri {
    Iri::new("http://example.org/repo/").unwrap()
}

fn app() -> (Router, RepoHandle) {
    let handle = RepoHandle::start(patchr_core::MemoryJournal::new(), base()).unwrap();
    (router(handle.clone(), ApiConfig::new(base())), handle)
}

struct Reply {
    status: StatusCode,
    headers: axum::http::HeaderMap,
    body: String,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }
}

async fn call(app: &Router, method: Method, uri: &str, content_type: Option<&str>, body: &str) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(ct) = content_type {
        req = req.header(header::CONTENT_TYPE, ct);
    }
    let response = app.clone().oneshot(req.body(Body::from(body.to_owned())).unwrap()).await.unwrap();
    let status = response.status();
    let headers = response.headers().clone();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    Reply { status, headers, body: String::from_utf8(bytes.to_vec()).unwrap() }
}

async fn get(app: &Router, uri: &str, accept: &str) -> Reply {
    let req = Request::get(uri).header(header::ACCEPT, accept).body(Body::empty()).unwrap();
    let response = app.clone().oneshot(req).await.unwrap();
    let status = response.status();
    let headers = response.headers().clone();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    Reply { status, headers, body: String::from_utf8(bytes.to_vec()).unwrap() }
}

fn enc(s: &str) -> String {
    url::form_urlencoded::byte_serialize(s.as_bytes()).collect()
}

#[tokio::test]
async fn submitting_listing1_creates_a_patch() {
    let (app, _) = app();
    let r = call(&app, Method::POST, "/patches", Some("text/turtle"), LISTING1_TTL).await;
    assert_eq!(r.status, StatusCode::CREATED, "{}", r.body);
    let id = r.json()["patchId"].as_str().unwrap().to_owned();
    assert_eq!(r.headers[header::LOCATION], id.as_str());
    assert_eq!(id, "http://example.org/repo/patch/1");
    assert_eq!(r.json()["merged"], false);

    let again = call(&app, Method::POST, "/patches?agent=http%3A%2F%2Fexample.org%2Frepo%2FPlayer_26", Some("text/turtle"), LISTING1_TTL).await;
    assert_eq!(again.status, StatusCode::OK);
    assert_eq!(again.json()["merged"], true);

    let fetched = get(&app, "/patch/1", "application/json").await;
    assert_eq!(fetched.status, StatusCode::OK);
    assert_eq!(fetched.json()["advocates"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn empty_repository_reports() {
    let (app, _) = app();
    for kind in ["popular", "recent"] {
        let r = get(&app, &format!("/reports/{kind}"), "application/json").await;
        assert_eq!(r.status, StatusCode::OK);
        assert_eq!(r.json(), json!([]));
    }
    assert_eq!(get(&app, "/reports/oldest", "*/*").await.status, StatusCode::NOT_FOUND);
    let r = get(&app, "/patches", "application/json").await;
    assert_eq!(r.json(), json!([]));
}

#[tokio::test]
async fn legacy_sparql_for_listing1() {
    let (app, _) = app();
    call(&app, Method::POST, "/patches", Some("text/turtle"), LISTING1_TTL).await;
    let r = get(&app, "/patches/1/sparql?dialect=legacy", "*/*").await;
    assert_eq!(r.status, StatusCode::OK);
    let normalized = r.body.split_whitespace().collect::<Vec<_>>().join(" ");
    assert_eq!(normalized, "INSERT DATA INTO <http://dbpedia.org/> { dbp:Oregon dbo:language dbp:English_language . }");

    let uri = format!("/datasets/{}/updates?dialect=legacy&prefixes=false", enc(fixtures::DBPEDIA_DATASET));
    let export = get(&app, &uri, "*/*").await;
    assert_eq!(export.status, StatusCode::OK);
    assert_eq!(export.body, r.body);
}

#[tokio::test]
async fn error_statuses() {
    let (app, _) = app();
    let r = call(&app, Method::POST, "/patches", Some("text/plain"), "hello").await;
    assert_eq!(r.status, StatusCode::UNSUPPORTED_MEDIA_TYPE);

    let r = call(&app, Method::POST, "/patches", Some("text/turtle"), "repo:x a .").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(r.json()["error"], "ParseError");

    let r = get(&app, "/patches/404", "application/json").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);

    let vote = json!({"agent": "http://example.org/repo/a", "position": "advocate"}).to_string();
    let r = call(&app, Method::POST, "/patches/9/votes", Some("application/json"), &vote).await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);

    call(&app, Method::POST, "/patches", Some("text/turtle"), LISTING1_TTL).await;
    let resolve = json!({"status": "resolved", "agent": "http://example.org/repo/admin"}).to_string();
    let r = call(&app, Method::POST, "/patches/1/status", Some("application/json"), &resolve).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["status"], "resolved");
    let r = call(&app, Method::POST, "/patches/1/status", Some("application/json"), &resolve).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
    let r = call(&app, Method::POST, "/patches/1/votes", Some("application/json"), &vote).await;
    assert_eq!(r.status, StatusCode::CONFLICT);

    let r = call(&app, Method::POST, "/patches/1/votes", Some("application/json"), "{").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = get(&app, "/patches?limit=0", "application/json").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = get(&app, "/entities", "application/json").await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn turtle_and_json_views_agree() {
    let (app, _) = app();
    call(&app, Method::POST, "/patches", Some("text/turtle"), LISTING1_TTL).await;
    let feedback = json!({
        "context": fixtures::fig3_context(),
        "vote": {"kind": "alsoAProperty", "subject": fixtures::dbp("Oregon"), "actor": fixtures::repo("Player_3"), "at": "2012-04-17T09:00:00Z"},
    });
    let r = call(&app, Method::POST, "/feedback", Some("application/json"), &feedback.to_string()).await;
    assert!(r.status.is_success(), "{}", r.body);

    let ttl = get(&app, "/patches", "text/turtle").await;
    assert!(ttl.headers[header::CONTENT_TYPE].to_str().unwrap().starts_with("text/turtle"));
    let json = get(&app, "/patches", "application/json").await;
    let from_turtle = patch_from_turtle(&ttl.body).unwrap();
    let from_json: Vec<patchr_core::Patch> = serde_json::from_str(&json.body).unwrap();
    let mut from_json = from_json;
    from_json.sort_by(|a, b| a.id.cmp(&b.id));
    assert_eq!(from_turtle, from_json);

    let snapshot = get(&app, "/snapshot.ttl", "*/*").await;
    let (a, _) = parse_turtle(&snapshot.body, None).unwrap();
    let (b, _) = parse_turtle(&ttl.body, None).unwrap();
    assert!(isomorphic(&a, &b));

    let subject = enc("http://dbpedia.org/resource/Oregon");
    let entities = get(&app, &format!("/entities?subject={subject}"), "application/json").await;
    assert_eq!(entities.json().as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn journal_records_exactly_the_successful_mutations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("journal.jsonl");
    let handle = RepoHandle::start(patchr_core::FileJournal::open(&path).unwrap(), base()).unwrap();
    let app = router(handle.clone(), ApiConfig::new(base()));

    let vote = |agent: &str, position: &str| json!({"agent": format!("http://example.org/repo/{agent}"), "position": position}).to_string();
    let group = json!({"id": "http://example.org/repo/group/g1", "label": "languages"}).to_string();
    let steps: Vec<(Method, &str, &str, String)> = vec![
        (Method::POST, "/patches", "text/turtle", LISTING1_TTL.to_owned()),
        (Method::POST, "/patches", "text/turtle", LISTING1_TTL.to_owned()),
        (Method::POST, "/patches/1/votes", "application/json", vote("a", "advocate")),
        (Method::POST, "/patches/1/votes", "application/json", vote("b", "criticiser")),
        (Method::POST, "/patches/1/votes", "application/json", vote("b", "advocate")),
        (Method::POST, "/patches/2/votes", "application/json", vote("c", "advocate")),
        (Method::POST, "/groups", "application/json", group.clone()),
        (Method::POST, "/groups", "application/json", group),
        (Method::POST, "/patches/1/groups", "application/json", json!({"groupId": "http://example.org/repo/group/g1"}).to_string()),
        (Method::POST, "/patches", "text/plain", "x".into()),
        (Method::POST, "/patches/1/status", "application/json", json!({"status": "rejected", "agent": "http://example.org/repo/admin"}).to_string()),
        (Method::POST, "/patches/1/status", "application/json", json!({"status": "active", "agent": "http://example.org/repo/admin"}).to_string()),
    ];
    let mut successes = 0;
    for (method, uri, ct, body) in steps {
        let r = call(&app, method, uri, Some(ct), &body).await;
        if r.status.is_success() {
            successes += 1;
        }
    }

    let text = std::fs::read_to_string(&path).unwrap();
    let events: Vec<RepositoryEvent> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(events.len(), successes);
    let replayed = replay(&events).unwrap();
    assert_eq!(&replayed, handle.snapshot().as_ref());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_submissions_merge_into_one_patch() {
    const CLIENTS: usize = 16;
    let (app, handle) = app();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });

    let client = reqwest::Client::new();
    let tasks: Vec<_> = (0..CLIENTS)
        .map(|i| {
            let client = client.clone();
            tokio::spawn(async move {
                let agent = enc(&format!("http://example.org/repo/Player_{i}"));
                client
                    .post(format!("http://{addr}/patches?agent={agent}"))
                    .header("content-type", "text/turtle")
                    .body(LISTING1_TTL)
                    .send()
                    .await
                    .unwrap()
                    .status()
            })
        })
        .collect();
    let mut created = 0;
    for task in tasks {
        let status = task.await.unwrap();
        assert!(status.is_success());
        if status == reqwest::StatusCode::CREATED {
            created += 1;
        }
    }
    assert_eq!(created, 1);
    let snapshot = handle.snapshot();
    assert_eq!(snapshot.len(), 1);
    let patch = snapshot.patches().next().unwrap();
    assert_eq!(patch.body.advocates.len(), CLIENTS);
}

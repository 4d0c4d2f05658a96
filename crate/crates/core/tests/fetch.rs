use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use paramine_core::extractor::{FetchError, Fetcher};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::TcpListener;

type Log = Arc<Mutex<Vec<(String, Instant)>>>;

/// Minimal HTTP/1.1 server: `/robots.txt` disallows `/private`, `/missing`
/// is a 404, `/flaky` a 503, anything else echoes its path in a page.
async fn server() -> (String, Log) {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    let log: Log = Arc::default();
    let seen = log.clone();
    tokio::spawn(async move {
        loop {
            let (mut sock, _) = listener.accept().await.unwrap();
            let seen = seen.clone();
            tokio::spawn(async move {
                let mut buf = vec![0u8; 4096];
                let n = sock.read(&mut buf).await.unwrap_or(0);
                let req = String::from_utf8_lossy(&buf[..n]);
                let path = req.split_whitespace().nth(1).unwrap_or("/").to_string();
                seen.lock().unwrap().push((path.clone(), Instant::now()));
                let (status, body) = match path.as_str() {
                    "/robots.txt" => ("200 OK", "User-agent: *\nDisallow: /private\n".to_string()),
                    "/missing" => ("404 Not Found", String::new()),
                    "/flaky" => ("503 Service Unavailable", String::new()),
                    p => ("200 OK", format!("<html><body><h1>{p}</h1></body></html>")),
                };
                let resp = format!("HTTP/1.1 {status}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len());
                let _ = sock.write_all(resp.as_bytes()).await;
            });
        }
    });
    (base, log)
}

#[tokio::test]
async fn page_bytes_and_url() {
    let (base, _) = server().await;
    let f = Fetcher::new(Duration::from_millis(10));
    let page = f.fetch(&format!("{base}/ku/a/1")).await.unwrap();
    assert_eq!(page.html, b"<html><body><h1>/ku/a/1</h1></body></html>");
    assert_eq!(page.url, format!("{base}/ku/a/1"));
}

#[tokio::test]
async fn politeness_gap_between_requests_to_one_host() {
    let (base, log) = server().await;
    let f = Fetcher::new(Duration::from_millis(500)).respect_robots(false);
    f.fetch(&format!("{base}/a")).await.unwrap();
    f.fetch(&format!("{base}/b")).await.unwrap();
    let log = log.lock().unwrap();
    assert_eq!(log.len(), 2);
    let gap = log[1].1 - log[0].1;
    assert!(gap >= Duration::from_millis(500), "gap {gap:?}");
}

#[tokio::test]
async fn politeness_holds_under_concurrency() {
    let (base, log) = server().await;
    let f = Arc::new(Fetcher::new(Duration::from_millis(200)).respect_robots(false));
    let urls: Vec<String> = (0..3).map(|i| format!("{base}/p{i}")).collect();
    let results = f.fetch_all(&urls).await;
    assert!(results.iter().all(Result::is_ok));
    // Results stay in input order.
    assert!(results[2].as_ref().unwrap().url.ends_with("/p2"));
    let mut times: Vec<Instant> = log.lock().unwrap().iter().map(|(_, t)| *t).collect();
    times.sort();
    for w in times.windows(2) {
        assert!(w[1] - w[0] >= Duration::from_millis(200));
    }
}

#[tokio::test]
async fn status_classification() {
    let (base, _) = server().await;
    let f = Fetcher::new(Duration::from_millis(1));
    let missing = f.fetch(&format!("{base}/missing")).await.unwrap_err();
    assert!(matches!(missing, FetchError::Permanent { status: 404, .. }));
    assert!(!missing.is_retryable());
    let flaky = f.fetch(&format!("{base}/flaky")).await.unwrap_err();
    assert!(flaky.is_retryable());
}

#[tokio::test]
async fn robots_exclusion() {
    let (base, log) = server().await;
    let f = Fetcher::new(Duration::from_millis(1));
    let err = f.fetch(&format!("{base}/private/x")).await.unwrap_err();
    assert!(matches!(err, FetchError::Disallowed { .. }));
    assert!(f.fetch(&format!("{base}/public")).await.is_ok());
    let paths: Vec<String> = log.lock().unwrap().iter().map(|(p, _)| p.clone()).collect();
    // robots.txt is read once per host and the disallowed page never requested.
    assert_eq!(paths, ["/robots.txt", "/public"]);
}

#[tokio::test]
async fn invalid_urls_rejected() {
    let f = Fetcher::new(Duration::from_millis(1));
    assert!(matches!(f.fetch("not a url").await, Err(FetchError::InvalidUrl(_))));
    assert!(matches!(f.fetch("ftp://example.org/x").await, Err(FetchError::InvalidUrl(_))));
}

mod common;

use common::{mock, strip_insignificant_whitespace};
use reqonto::refine::{HttpOracle, HttpOracleConfig, Oracle, OracleError};
use serde_json::{json, Value};

fn completion(text: &str) -> String {
    json!({"choices": [{"index": 0, "message": {"role": "assistant", "content": text}}]}).to_string()
}

fn config(endpoint: String) -> HttpOracleConfig {
    HttpOracleConfig {
        endpoint,
        model: None,
        api_key: Some("secret".into()),
        timeout_seconds: 5.0,
        retries: 2,
        backoff_seconds: 0.01,
        price_per_call: Some(0.5),
    }
}

#[test]
fn request_body_has_the_chat_structure() {
    let (url, seen, server) = mock(vec![(200, completion("True"))]);
    let oracle = HttpOracle::new(config(url)).unwrap();
    let reply = oracle
        .ask("decommissioning procedure", "issue addressing plan")
        .unwrap();
    assert_eq!(reply.text, "True");
    server.join().unwrap();

    let seen = seen.lock().unwrap();
    let r = &seen[0];
    assert_eq!(r.request_line, "POST /v1/chat/completions HTTP/1.1");
    assert!(r.headers.contains(&("authorization".into(), "Bearer secret".into())));
    assert!(r
        .headers
        .iter()
        .any(|(k, v)| k == "content-type" && v.starts_with("application/json")));

    let body: Value = serde_json::from_str(&r.body).unwrap();
    let want = json!({
        "messages": [
            {"role": "system", "content": "You only answer with true or false."},
            {"role": "user", "content": "Can I merge instances \"decommissioning procedure\" and \"issue addressing plan\"?"}
        ]
    });
    assert_eq!(body, want);
    // byte-equal, key order included, once whitespace is dropped
    let literal = r#"{
  "messages": [
    {
      "role": "system",
      "content": "You only answer with true or false."
    },
    {
      "role": "user",
      "content": "Can I merge instances \"decommissioning procedure\" and \"issue addressing plan\"?"
    }
  ]
}"#;
    assert_eq!(r.body, strip_insignificant_whitespace(literal));
}

#[test]
fn model_is_sent_when_configured() {
    let (url, seen, server) = mock(vec![(200, completion("false"))]);
    let oracle = HttpOracle::new(HttpOracleConfig {
        model: Some("local-model".into()),
        api_key: None,
        ..config(url)
    })
    .unwrap();
    oracle.ask("a", "b").unwrap();
    server.join().unwrap();
    let seen = seen.lock().unwrap();
    let body: Value = serde_json::from_str(&seen[0].body).unwrap();
    assert_eq!(body["model"], "local-model");
    assert!(!seen[0].headers.iter().any(|(k, _)| k == "authorization"));
}

#[test]
fn server_errors_are_retried() {
    let (url, seen, server) = mock(vec![
        (503, "busy".into()),
        (429, "slow down".into()),
        (200, completion("true.")),
    ]);
    let oracle = HttpOracle::new(config(url)).unwrap();
    assert_eq!(oracle.ask("x", "y").unwrap().text, "true.");
    server.join().unwrap();
    assert_eq!(seen.lock().unwrap().len(), 3);
}

#[test]
fn client_errors_are_not_retried() {
    let (url, seen, server) = mock(vec![(400, "bad".into())]);
    let oracle = HttpOracle::new(config(url)).unwrap();
    match oracle.ask("x", "y") {
        Err(OracleError::Transport { attempts, message }) => {
            assert_eq!(attempts, 1);
            assert!(message.contains("400"));
        }
        other => panic!("{other:?}"),
    }
    server.join().unwrap();
    assert_eq!(seen.lock().unwrap().len(), 1);
}

#[test]
fn retries_run_out() {
    let (url, _, server) = mock(vec![(500, "a".into()), (500, "b".into()), (500, "c".into())]);
    let oracle = HttpOracle::new(config(url)).unwrap();
    assert!(matches!(
        oracle.ask("x", "y"),
        Err(OracleError::Transport { attempts: 3, .. })
    ));
    server.join().unwrap();
}

#[test]
fn plain_text_body_is_the_answer() {
    let (url, _, server) = mock(vec![(200, "False".into())]);
    let oracle = HttpOracle::new(config(url)).unwrap();
    assert_eq!(oracle.ask("x", "y").unwrap().text, "False");
    server.join().unwrap();
}

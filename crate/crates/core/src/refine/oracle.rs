use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{CandidatePair, Judgment};

pub const SYSTEM_PROMPT: &str = "You only answer with true or false.";

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("request failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("oracle configuration: {0}")]
    Config(String),
}

/// Raw text from an oracle, plus a latency the oracle wants reported in
/// place of the measured one (the stub uses this for reproducible runs).
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReply {
    pub text: String,
    pub latency_seconds: Option<f64>,
}

pub trait Oracle: Sync {
    fn ask(&self, a: &str, b: &str) -> Result<OracleReply, OracleError>;

    fn price_per_call(&self) -> Option<f64> {
        None
    }
}

/// `true`/`false` after trimming, lowercasing and stripping trailing
/// punctuation; anything else is `None`.
pub fn parse_verdict(raw: &str) -> Option<bool> {
    let lowered = raw.trim().to_lowercase();
    let stripped = lowered.trim_end_matches(|c: char| c.is_ascii_punctuation()).trim_end();
    match stripped {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

pub fn user_prompt(a: &str, b: &str) -> String {
    format!("Can I merge instances \"{a}\" and \"{b}\"?")
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    messages: [ChatMessage<'a>; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<&'a str>,
}

/// JSON body sent for the pair `(a, b)`.
pub fn request_body(a: &str, b: &str, model: Option<&str>) -> String {
    let user = user_prompt(a, b);
    let req = ChatRequest {
        messages: [
            ChatMessage {
                role: "system",
                content: SYSTEM_PROMPT,
            },
            ChatMessage {
                role: "user",
                content: &user,
            },
        ],
        model,
    };
    serde_json::to_string(&req).expect("request serializes")
}

/// `choices[0].message.content` of a chat-completion response, or the body
/// itself when it is not one.
fn response_text(body: &str) -> String {
    serde_json::from_str::<serde_json::Value>(body)
        .ok()
        .and_then(|v| {
            v.pointer("/choices/0/message/content")
                .and_then(|c| c.as_str())
                .map(str::to_string)
        })
        .unwrap_or_else(|| body.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HttpOracleConfig {
    pub endpoint: String,
    pub model: Option<String>,
    /// Bearer token, already read from the environment.
    pub api_key: Option<String>,
    pub timeout_seconds: f64,
    pub retries: u32,
    pub backoff_seconds: f64,
    pub price_per_call: Option<f64>,
}

pub struct HttpOracle {
    config: HttpOracleConfig,
    agent: ureq::Agent,
}

impl HttpOracle {
    pub fn new(config: HttpOracleConfig) -> Result<Self, OracleError> {
        if config.timeout_seconds.is_nan() || config.timeout_seconds <= 0.0 {
            return Err(OracleError::Config("timeout_seconds must be positive".into()));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_seconds)))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self { config, agent })
    }

    fn attempt(&self, body: &str) -> Result<String, (bool, String)> {
        let mut req = self
            .agent
            .post(&self.config.endpoint)
            .header("Content-Type", "application/json");
        if let Some(key) = &self.config.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let mut resp = req.send(body).map_err(|e| (true, e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| (true, e.to_string()))?;
        match status {
            200..=299 => Ok(text),
            429 | 500..=599 => Err((true, format!("HTTP {status}: {text}"))),
            _ => Err((false, format!("HTTP {status}: {text}"))),
        }
    }
}

impl Oracle for HttpOracle {
    fn ask(&self, a: &str, b: &str) -> Result<OracleReply, OracleError> {
        let body = request_body(a, b, self.config.model.as_deref());
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(&body) {
                Ok(text) => {
                    return Ok(OracleReply {
                        text: response_text(&text),
                        latency_seconds: None,
                    })
                }
                Err((retriable, message)) => {
                    if !retriable || attempts > self.config.retries {
                        return Err(OracleError::Transport { attempts, message });
                    }
                    let wait = self.config.backoff_seconds * 2f64.powi(attempts as i32 - 1);
                    std::thread::sleep(Duration::from_secs_f64(wait));
                }
            }
        }
    }

    fn price_per_call(&self) -> Option<f64> {
        self.config.price_per_call
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StubAnswer {
    pub a: String,
    pub b: String,
    pub response: String,
    #[serde(default)]
    pub latency_seconds: f64,
}

/// Table of canned responses keyed by instance names, order-insensitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StubTable {
    #[serde(default = "default_response")]
    pub default: String,
    #[serde(default)]
    pub default_latency_seconds: f64,
    #[serde(default)]
    pub answers: Vec<StubAnswer>,
}

fn default_response() -> String {
    "false".into()
}

pub struct StubOracle {
    table: HashMap<(String, String), (String, f64)>,
    default: (String, f64),
    price: Option<f64>,
    /// Pairs asked so far, for tests that check fan-out.
    pub calls: Mutex<Vec<(String, String)>>,
}

fn sorted(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl StubOracle {
    pub fn new(table: StubTable, price: Option<f64>) -> Self {
        Self {
            table: table
                .answers
                .into_iter()
                .map(|s| (sorted(&s.a, &s.b), (s.response, s.latency_seconds)))
                .collect(),
            default: (table.default, table.default_latency_seconds),
            price,
            calls: Mutex::new(Vec::new()),
        }
    }
}

impl Oracle for StubOracle {
    fn ask(&self, a: &str, b: &str) -> Result<OracleReply, OracleError> {
        self.calls
            .lock()
            .expect("poisoned")
            .push((a.to_string(), b.to_string()));
        let (text, latency) = self.table.get(&sorted(a, b)).unwrap_or(&self.default);
        Ok(OracleReply {
            text: text.clone(),
            latency_seconds: Some(*latency),
        })
    }

    fn price_per_call(&self) -> Option<f64> {
        self.price
    }
}

/// Ask `oracle` about one pair, using the labels as the instance names.
pub fn judge_pair(oracle: &dyn Oracle, pair: &CandidatePair) -> Result<Judgment, OracleError> {
    let started = Instant::now();
    let reply = oracle.ask(&pair.a_label, &pair.b_label)?;
    let measured = started.elapsed().as_secs_f64();
    let verdict = parse_verdict(&reply.text);
    Ok(Judgment {
        pair: pair.clone(),
        mergeable: verdict.unwrap_or(false),
        invalid: verdict.is_none(),
        raw_response: reply.text,
        latency_seconds: reply.latency_seconds.unwrap_or(measured),
        cost_estimate: oracle.price_per_call(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeReport {
    pub pairs: usize,
    pub judged: usize,
    pub mergeable: usize,
    pub invalid: usize,
    pub failed: usize,
    pub mean_latency_seconds: Option<f64>,
    pub total_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JudgeOutcome {
    /// In the order of the input pairs.
    pub judgments: Vec<Judgment>,
    pub failures: Vec<(CandidatePair, OracleError)>,
}

impl JudgeOutcome {
    pub fn report(&self) -> JudgeReport {
        let n = self.judgments.len();
        let costs: Vec<f64> = self.judgments.iter().filter_map(|j| j.cost_estimate).collect();
        JudgeReport {
            pairs: n + self.failures.len(),
            judged: n,
            mergeable: self.judgments.iter().filter(|j| j.mergeable).count(),
            invalid: self.judgments.iter().filter(|j| j.invalid).count(),
            failed: self.failures.len(),
            mean_latency_seconds: (n > 0)
                .then(|| self.judgments.iter().map(|j| j.latency_seconds).sum::<f64>() / n as f64),
            total_cost: (!costs.is_empty()).then(|| costs.iter().sum()),
        }
    }
}

/// Judge every pair with at most `max_parallel` requests in flight. Results
/// keep the input order, so the outcome does not depend on scheduling.
pub fn judge_all(oracle: &dyn Oracle, pairs: &[CandidatePair], max_parallel: usize) -> JudgeOutcome {
    let workers = max_parallel.max(1).min(pairs.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<Judgment, OracleError>>>> = pairs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(pair) = pairs.get(i) else { break };
                let r = judge_pair(oracle, pair);
                *slots[i].lock().expect("poisoned") = Some(r);
            });
        }
    });
    let mut out = JudgeOutcome {
        judgments: Vec::new(),
        failures: Vec::new(),
    };
    for (pair, slot) in pairs.iter().zip(slots) {
        match slot.into_inner().expect("poisoned").expect("every slot filled") {
            Ok(j) => out.judgments.push(j),
            Err(e) => out.failures.push((pair.clone(), e)),
        }
    }
    out
}

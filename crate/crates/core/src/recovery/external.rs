//! Adapters for recoverers and metrics running in another process.
//!
//! Both speak one JSON object per line over the child's stdin/stdout.
//! Recoverer: `{"corrupted": .., "purpose": ..}` in, `{"recovered": ..}` out.
//! Similarity: `{"a": .., "b": ..}` in, `{"similarity": ..}` out.

use std::{
    io::{BufRead, BufReader, Write},
    process::{Child, ChildStdin, ChildStdout, Command, Stdio},
    sync::Mutex,
};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::{RecoveryError, Recoverer, SimilarityMetric};
use crate::{context::PurposeTag, textcodec};

struct Pipe {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

impl Pipe {
    fn spawn(program: &str, args: &[String]) -> Result<Self, RecoveryError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| RecoveryError::Process(format!("{program}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self { child, stdin, stdout })
    }

    fn call<Q: Serialize, A: DeserializeOwned>(&mut self, req: &Q) -> Result<A, RecoveryError> {
        let mut line = serde_json::to_string(req).map_err(|e| RecoveryError::Protocol(e.to_string()))?;
        line.push('\n');
        self.stdin.write_all(line.as_bytes())?;
        self.stdin.flush()?;
        let mut reply = String::new();
        if self.stdout.read_line(&mut reply)? == 0 {
            return Err(RecoveryError::Process("child closed its output".into()));
        }
        serde_json::from_str(reply.trim_end()).map_err(|e| RecoveryError::Protocol(format!("{e}: {reply:?}")))
    }
}

impl Drop for Pipe {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

#[derive(Serialize)]
struct RecoverRequest<'a> {
    corrupted: &'a str,
    purpose: PurposeTag,
}

#[derive(Deserialize)]
struct RecoverReply {
    recovered: String,
}

/// A recoverer served by a child process. Replies are normalized to the
/// default alphabet; calls are serialized.
pub struct ExternalRecoverer {
    pipe: Mutex<Pipe>,
}

impl ExternalRecoverer {
    pub fn spawn(program: &str, args: &[String]) -> Result<Self, RecoveryError> {
        Ok(Self { pipe: Mutex::new(Pipe::spawn(program, args)?) })
    }
}

impl Recoverer for ExternalRecoverer {
    fn name(&self) -> &str {
        "external"
    }

    fn recover(&self, corrupted: &str, purpose: PurposeTag) -> Result<String, RecoveryError> {
        let mut pipe = self.pipe.lock().expect("external recoverer lock");
        let reply: RecoverReply = pipe.call(&RecoverRequest { corrupted, purpose })?;
        Ok(textcodec::normalize_message(&reply.recovered).unwrap_or_default())
    }

    fn concurrent(&self) -> bool {
        false
    }
}

#[derive(Serialize)]
struct SimilarityRequest<'a> {
    a: &'a str,
    b: &'a str,
}

#[derive(Deserialize)]
struct SimilarityReply {
    similarity: f64,
}

/// A similarity metric served by a child process, e.g. a sentence-embedding
/// model. Scores are clamped to [0, 1].
pub struct ExternalSimilarity {
    pipe: Mutex<Pipe>,
}

impl ExternalSimilarity {
    pub fn spawn(program: &str, args: &[String]) -> Result<Self, RecoveryError> {
        Ok(Self { pipe: Mutex::new(Pipe::spawn(program, args)?) })
    }
}

impl SimilarityMetric for ExternalSimilarity {
    fn similarity(&self, a: &str, b: &str) -> Result<f64, RecoveryError> {
        let mut pipe = self.pipe.lock().expect("external metric lock");
        let reply: SimilarityReply = pipe.call(&SimilarityRequest { a, b })?;
        if !reply.similarity.is_finite() {
            return Err(RecoveryError::Protocol(format!("non-finite similarity {}", reply.similarity)));
        }
        Ok(reply.similarity.clamp(0.0, 1.0))
    }

    fn concurrent(&self) -> bool {
        false
    }
}

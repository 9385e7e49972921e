//! Classifier adapter protocol: line-delimited JSON over a child process's
//! stdin/stdout. One request per line, one response per request with a
//! matching id; score values are validated against the context's metric
//! range on receipt.

use super::surrogate::{
    key_prediction_accuracy, piracy_score, re_accuracy, train_key_oracle, train_node_oracle,
    trojan_loc_score, DEFAULT_WL_DEPTH,
};
use super::{Context, OracleError, OracleScore};
use crate::netlist::{parse_blif, CellId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KeyGateRef {
    pub cell: u32,
    pub bit: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdapterRequest {
    pub id: u64,
    pub context: String,
    pub circuit_blif: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_blif: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_gates: Option<Vec<KeyGateRef>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdapterResponse {
    pub id: u64,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_node: Option<BTreeMap<String, String>>,
}

/// Handle to one attached classifier adapter process.
pub struct AdapterClient {
    child: Child,
    stdin: std::process::ChildStdin,
    lines: mpsc::Receiver<std::io::Result<String>>,
    next_id: u64,
    pub timeout: Duration,
}

impl AdapterClient {
    /// Spawn `command` (argv form) with piped stdio.
    pub fn spawn(command: &[String]) -> Result<AdapterClient, OracleError> {
        if command.is_empty() {
            return Err(OracleError::Protocol("empty adapter command".into()));
        }
        let mut child = Command::new(&command[0])
            .args(&command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(AdapterClient { child, stdin, lines: rx, next_id: 1, timeout: DEFAULT_TIMEOUT })
    }

    /// One request/response exchange; validates id matching and score range.
    pub fn query(
        &mut self,
        context: Context,
        circuit_blif: String,
        reference_blif: Option<String>,
        truth: Option<BTreeMap<String, String>>,
        key_gates: Option<Vec<KeyGateRef>>,
    ) -> Result<OracleScore, OracleError> {
        let id = self.next_id;
        self.next_id += 1;
        let request = AdapterRequest {
            id,
            context: context.name().to_string(),
            circuit_blif,
            reference_blif,
            truth,
            key_gates,
        };
        let mut line = serde_json::to_string(&request)
            .map_err(|e| OracleError::Protocol(format!("request encode: {e}")))?;
        line.push('\n');
        self.stdin.write_all(line.as_bytes())?;
        self.stdin.flush()?;

        let raw = match self.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(OracleError::Io(e)),
            Err(mpsc::RecvTimeoutError::Timeout) => return Err(OracleError::Timeout(self.timeout)),
            Err(mpsc::RecvTimeoutError::Disconnected) => {
                return Err(OracleError::Protocol("adapter closed its output".into()))
            }
        };
        let response: AdapterResponse = serde_json::from_str(&raw)
            .map_err(|e| OracleError::Protocol(format!("malformed response: {e}")))?;
        if response.id != id {
            return Err(OracleError::Protocol(format!(
                "response id {} does not match request id {id}",
                response.id
            )));
        }
        let per_node = response.per_node.map(|m| {
            m.into_iter()
                .filter_map(|(k, v)| k.parse::<u32>().ok().map(|cell| (cell, v)))
                .collect()
        });
        let score =
            OracleScore { context, value: response.value, per_node, metric: context.metric() };
        score.check_range()?;
        Ok(score)
    }
}

impl Drop for AdapterClient {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Fault injection for protocol-conformance testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultMode {
    OutOfRange,
    BadJson,
    WrongId,
}

/// What a serving loop answers with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServeMode {
    /// Always value 0.0.
    Echo,
    /// Score with the built-in surrogates (self-trained for node oracles).
    Builtin { tau: f64 },
    /// Deliberately malformed responses.
    Fault(FaultMode),
}

fn builtin_value(request: &AdapterRequest, tau: f64) -> Result<f64, OracleError> {
    let context = Context::parse(&request.context)
        .ok_or_else(|| OracleError::Protocol(format!("unknown context `{}`", request.context)))?;
    let circuit = parse_blif(&request.circuit_blif)?;
    let parse_truth = |truth: &Option<BTreeMap<String, String>>| -> Result<BTreeMap<CellId, String>, OracleError> {
        let t = truth
            .as_ref()
            .ok_or_else(|| OracleError::Protocol("missing truth labels".into()))?;
        t.iter()
            .map(|(k, v)| {
                k.parse::<u32>()
                    .map(|c| (CellId(c), v.clone()))
                    .map_err(|_| OracleError::Protocol(format!("bad cell id `{k}`")))
            })
            .collect()
    };
    match context {
        Context::Piracy => {
            let reference_text = request
                .reference_blif
                .as_ref()
                .ok_or_else(|| OracleError::Protocol("missing reference circuit".into()))?;
            let reference = parse_blif(reference_text)?;
            Ok(piracy_score(&circuit, &reference, tau).value)
        }
        Context::TrojanLoc => {
            let truth = parse_truth(&request.truth)?;
            let model = train_node_oracle(&[(&circuit, &truth)], DEFAULT_WL_DEPTH)?;
            Ok(trojan_loc_score(&circuit, &truth, &model)?.value)
        }
        Context::ReverseEng => {
            let truth = parse_truth(&request.truth)?;
            let model = train_node_oracle(&[(&circuit, &truth)], DEFAULT_WL_DEPTH)?;
            Ok(re_accuracy(&circuit, &truth, &model)?.value)
        }
        Context::Obfuscation => {
            let gates: Vec<(CellId, bool)> = request
                .key_gates
                .as_ref()
                .ok_or_else(|| OracleError::Protocol("missing key gates".into()))?
                .iter()
                .map(|g| (CellId(g.cell), g.bit != 0))
                .collect();
            let model = train_key_oracle(&[(&circuit, &gates[..])], DEFAULT_WL_DEPTH)?;
            Ok(key_prediction_accuracy(&circuit, &gates, &model)?.value)
        }
    }
}

/// Answer requests line by line until EOF. Used by the loopback adapter.
pub fn serve_protocol(
    reader: impl std::io::Read,
    mut writer: impl Write,
    mode: ServeMode,
) -> Result<(), OracleError> {
    let reader = BufReader::new(reader);
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let request: AdapterRequest = serde_json::from_str(&line)
            .map_err(|e| OracleError::Protocol(format!("malformed request: {e}")))?;
        let reply = match mode {
            ServeMode::Echo => AdapterResponse { id: request.id, value: 0.0, per_node: None },
            ServeMode::Builtin { tau } => AdapterResponse {
                id: request.id,
                value: builtin_value(&request, tau)?,
                per_node: None,
            },
            ServeMode::Fault(FaultMode::OutOfRange) => {
                AdapterResponse { id: request.id, value: 1.3, per_node: None }
            }
            ServeMode::Fault(FaultMode::WrongId) => {
                AdapterResponse { id: request.id + 1, value: 0.0, per_node: None }
            }
            ServeMode::Fault(FaultMode::BadJson) => {
                writeln!(writer, "not json")?;
                writer.flush()?;
                continue;
            }
        };
        let mut out = serde_json::to_string(&reply)
            .map_err(|e| OracleError::Protocol(format!("response encode: {e}")))?;
        out.push('\n');
        writer.write_all(out.as_bytes())?;
        writer.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::netlist::write_blif;

    fn roundtrip(mode: ServeMode, request: &AdapterRequest) -> String {
        let mut line = serde_json::to_string(request).unwrap();
        line.push('\n');
        let mut out = Vec::new();
        serve_protocol(line.as_bytes(), &mut out, mode).unwrap();
        String::from_utf8(out).unwrap()
    }

    fn piracy_request(id: u64) -> AdapterRequest {
        let fa = corpus::full_adder();
        AdapterRequest {
            id,
            context: "piracy".into(),
            circuit_blif: write_blif(&fa),
            reference_blif: Some(write_blif(&fa)),
            truth: None,
            key_gates: None,
        }
    }

    #[test]
    fn echo_serves_zero() {
        let out = roundtrip(ServeMode::Echo, &piracy_request(7));
        let resp: AdapterResponse = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(resp.id, 7);
        assert_eq!(resp.value, 0.0);
    }

    #[test]
    fn builtin_serves_identity_score() {
        let out = roundtrip(ServeMode::Builtin { tau: 0.85 }, &piracy_request(3));
        let resp: AdapterResponse = serde_json::from_str(out.trim()).unwrap();
        assert!((resp.value - 0.15).abs() < 1e-12);
    }

    #[test]
    fn malformed_request_is_rejected() {
        let mut out = Vec::new();
        let err = serve_protocol("not json\n".as_bytes(), &mut out, ServeMode::Echo);
        assert!(matches!(err, Err(OracleError::Protocol(_))));
    }
}

//! Client for external encoders speaking newline-delimited JSON over a TCP
//! socket or a child process's standard streams.
//!
//! ```text
//! -> {"op":"hello"}
//! <- {"dim":64,"name":"..."}
//! -> {"id":7,"op":"encode","ctx":["find","me"],"pair":["city"]}
//! <- {"id":7,"dim":64,"cls":[...],"ctx_reps":[[...],[...]]}
//! <- {"id":7,"error":"..."}
//! ```
//!
//! Each connection carries one request at a time; a pool of connections
//! serves concurrent callers. [`serve`] is the server side of the same
//! protocol over any line stream.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sgdst_core::encoder::{Encoder, EncoderOutput};
use sgdst_core::{Error, Result};

pub const ENV_ADDRESS: &str = "SGDST_SIDECAR";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Tcp(String),
    Command(Vec<String>),
}

impl Endpoint {
    /// `tcp:host:port` or `cmd:<program> [args...]` (whitespace-separated).
    pub fn parse(address: &str) -> Result<Self> {
        if let Some(addr) = address.strip_prefix("tcp:") {
            if addr.rsplit_once(':').is_none_or(|(h, p)| h.is_empty() || p.parse::<u16>().is_err()) {
                return Err(Error::Usage(format!("bad sidecar address `{address}`, expected tcp:host:port")));
            }
            return Ok(Endpoint::Tcp(addr.to_string()));
        }
        if let Some(cmd) = address.strip_prefix("cmd:") {
            let argv: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            if argv.is_empty() {
                return Err(Error::Usage("empty sidecar command".into()));
            }
            return Ok(Endpoint::Command(argv));
        }
        Err(Error::Usage(format!("bad sidecar address `{address}`, expected tcp:host:port or cmd:program")))
    }
}

#[derive(Debug, Serialize)]
struct EncodeRequest<'a> {
    id: u64,
    op: &'static str,
    ctx: &'a [String],
    pair: &'a [String],
}

#[derive(Debug, Deserialize)]
struct Hello {
    dim: usize,
    name: String,
}

struct Conn {
    lines: Receiver<std::io::Result<String>>,
    writer: Box<dyn Write + Send>,
    child: Option<Child>,
}

impl Drop for Conn {
    fn drop(&mut self) {
        if let Some(child) = &mut self.child {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

fn transport(e: impl std::fmt::Display) -> Error {
    Error::Transport(e.to_string())
}

fn reader_thread(reader: impl Read + Send + 'static) -> Receiver<std::io::Result<String>> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(reader).lines() {
            let stop = line.is_err();
            if tx.send(line).is_err() || stop {
                break;
            }
        }
    });
    rx
}

impl Conn {
    fn open(endpoint: &Endpoint) -> Result<Self> {
        match endpoint {
            Endpoint::Tcp(addr) => {
                let stream = TcpStream::connect(addr).map_err(|e| transport(format!("connect {addr}: {e}")))?;
                let read = stream.try_clone().map_err(transport)?;
                Ok(Conn { lines: reader_thread(read), writer: Box::new(stream), child: None })
            }
            Endpoint::Command(argv) => {
                let mut child = Command::new(&argv[0])
                    .args(&argv[1..])
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()
                    .map_err(|e| transport(format!("spawn `{}`: {e}", argv[0])))?;
                let stdout = child.stdout.take().expect("piped");
                let stdin = child.stdin.take().expect("piped");
                Ok(Conn { lines: reader_thread(stdout), writer: Box::new(stdin), child: Some(child) })
            }
        }
    }

    fn send(&mut self, msg: &str) -> Result<()> {
        self.writer
            .write_all(msg.as_bytes())
            .and_then(|_| self.writer.write_all(b"\n"))
            .and_then(|_| self.writer.flush())
            .map_err(transport)
    }

    fn recv(&mut self, timeout: Duration) -> Result<Value> {
        let line = match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(transport(e)),
            Err(RecvTimeoutError::Timeout) => return Err(transport(format!("no response within {timeout:?}"))),
            Err(RecvTimeoutError::Disconnected) => return Err(transport("connection closed")),
        };
        serde_json::from_str(&line).map_err(|e| Error::Protocol(format!("unparseable message: {e}")))
    }
}

/// Encoder backed by an external process.
pub struct SidecarEncoder {
    endpoint: Endpoint,
    dim: usize,
    name: String,
    timeout: Duration,
    next_id: AtomicU64,
    pool: Mutex<Vec<Conn>>,
}

impl std::fmt::Debug for SidecarEncoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SidecarEncoder")
            .field("endpoint", &self.endpoint)
            .field("dim", &self.dim)
            .field("name", &self.name)
            .finish()
    }
}

impl SidecarEncoder {
    /// Connects and performs the handshake. The advertised dimension must
    /// equal `expected_dim`.
    pub fn connect(address: &str, expected_dim: usize, timeout: Duration) -> Result<Self> {
        let endpoint = Endpoint::parse(address)?;
        let mut conn = Conn::open(&endpoint)?;
        conn.send(r#"{"op":"hello"}"#)?;
        let reply = conn.recv(timeout)?;
        if let Some(err) = reply.get("error") {
            return Err(Error::Protocol(format!("handshake rejected: {err}")));
        }
        let hello: Hello =
            serde_json::from_value(reply).map_err(|e| Error::Protocol(format!("bad handshake reply: {e}")))?;
        if hello.dim != expected_dim {
            return Err(Error::Protocol(format!(
                "sidecar `{}` has dim {} but {expected_dim} was configured",
                hello.name, hello.dim
            )));
        }
        Ok(SidecarEncoder {
            endpoint,
            dim: hello.dim,
            name: hello.name,
            timeout,
            next_id: AtomicU64::new(1),
            pool: Mutex::new(vec![conn]),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn checkout(&self) -> Result<Conn> {
        let pooled = self.pool.lock().unwrap_or_else(|e| e.into_inner()).pop();
        match pooled {
            Some(c) => Ok(c),
            None => Conn::open(&self.endpoint),
        }
    }

    fn parse_response(&self, id: u64, n: usize, reply: &Value) -> Result<EncoderOutput> {
        if let Some(err) = reply.get("error") {
            return Err(Error::Encoder(format!("sidecar request {id} failed: {err}")));
        }
        let floats = |v: &Value, what: &str| -> Result<Vec<f64>> {
            let arr = v.as_array().ok_or_else(|| Error::Protocol(format!("`{what}` is not an array")))?;
            arr.iter()
                .map(|x| {
                    x.as_f64()
                        .filter(|f| f.is_finite())
                        .ok_or_else(|| Error::Protocol(format!("non-finite or non-numeric value in `{what}`")))
                })
                .collect()
        };
        let dim = reply.get("dim").and_then(Value::as_u64).map(|d| d as usize);
        if dim != Some(self.dim) {
            return Err(Error::Protocol(format!("response dim {dim:?} differs from handshake dim {}", self.dim)));
        }
        let cls = floats(reply.get("cls").unwrap_or(&Value::Null), "cls")?;
        let rows = reply
            .get("ctx_reps")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Protocol("missing `ctx_reps`".into()))?;
        if rows.len() != n {
            return Err(Error::Protocol(format!("{} context rows for {n} tokens", rows.len())));
        }
        let mut token_reps = Vec::with_capacity(n * self.dim);
        for row in rows {
            let r = floats(row, "ctx_reps")?;
            if r.len() != self.dim {
                return Err(Error::Protocol(format!("context row of length {} for dim {}", r.len(), self.dim)));
            }
            token_reps.extend(r);
        }
        if cls.len() != self.dim {
            return Err(Error::Protocol(format!("cls of length {} for dim {}", cls.len(), self.dim)));
        }
        Ok(EncoderOutput { cls, token_reps, dim: self.dim })
    }
}

impl Encoder for SidecarEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, context: &[String], pair: &[String]) -> Result<EncoderOutput> {
        if context.is_empty() {
            return Err(Error::Usage("encode requires at least one context token".into()));
        }
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let msg = serde_json::to_string(&EncodeRequest { id, op: "encode", ctx: context, pair })
            .map_err(|e| Error::Protocol(e.to_string()))?;
        let mut conn = self.checkout()?;
        conn.send(&msg)?;
        let reply = loop {
            let reply = conn.recv(self.timeout)?;
            match reply.get("id").and_then(Value::as_u64) {
                Some(rid) if rid == id => break reply,
                // late answer to an abandoned request
                Some(rid) if rid < id => log::warn!("dropping stale sidecar response {rid}"),
                other => return Err(Error::Protocol(format!("response id {other:?} for request {id}"))),
            }
        };
        let out = self.parse_response(id, context.len(), &reply)?;
        self.pool.lock().unwrap_or_else(|e| e.into_inner()).push(conn);
        Ok(out)
    }
}

/// Serves the protocol with `encoder` until the input ends. Malformed
/// requests get an in-band error carrying their id (0 if unreadable).
pub fn serve(encoder: &dyn Encoder, name: &str, input: impl BufRead, mut output: impl Write) -> std::io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = handle(encoder, name, &line);
        writeln!(output, "{reply}")?;
        output.flush()?;
    }
    Ok(())
}

fn handle(encoder: &dyn Encoder, name: &str, line: &str) -> Value {
    let req: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return serde_json::json!({"id": 0, "error": format!("unparseable request: {e}")}),
    };
    let id = req.get("id").and_then(Value::as_u64).unwrap_or(0);
    let strings = |key: &str| -> Option<Vec<String>> {
        req.get(key)?.as_array()?.iter().map(|v| v.as_str().map(String::from)).collect()
    };
    match req.get("op").and_then(Value::as_str) {
        Some("hello") => serde_json::json!({"dim": encoder.dim(), "name": name}),
        Some("encode") => {
            let (Some(ctx), Some(pair)) = (strings("ctx"), strings("pair")) else {
                return serde_json::json!({"id": id, "error": "`ctx` and `pair` must be string arrays"});
            };
            match encoder.encode(&ctx, &pair) {
                Ok(out) => {
                    let rows: Vec<&[f64]> = (0..out.len()).map(|i| out.row(i)).collect();
                    serde_json::json!({"id": id, "dim": out.dim, "cls": out.cls, "ctx_reps": rows})
                }
                Err(e) => serde_json::json!({"id": id, "error": e.to_string()}),
            }
        }
        _ => serde_json::json!({"id": id, "error": "unknown op"}),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_parse() {
        assert_eq!(Endpoint::parse("tcp:127.0.0.1:9000").unwrap(), Endpoint::Tcp("127.0.0.1:9000".into()));
        assert_eq!(
            Endpoint::parse("cmd:python3 ref.py --dim 64").unwrap(),
            Endpoint::Command(vec!["python3".into(), "ref.py".into(), "--dim".into(), "64".into()])
        );
        assert!(Endpoint::parse("tcp:nohost").is_err());
        assert!(Endpoint::parse("udp:x:1").is_err());
        assert!(Endpoint::parse("cmd:").is_err());
    }
}

//! External sentence rewriters.
//!
//! The plugin is a process that reads `{"id","text"}` JSON lines on stdin
//! and writes one `{"id","text","changed"}` line per input on stdout. A
//! non-zero exit status, a missing or unknown id, or exceeding the timeout
//! is an error.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::multi::{Rewrite, SentenceRewriter};
use crate::{Error, Result};

#[derive(Serialize)]
struct Request<'a> {
    id: &'a str,
    text: &'a str,
}

#[derive(Deserialize)]
struct Response {
    id: String,
    text: String,
    changed: bool,
}

#[derive(Debug, Clone)]
pub struct ExternalRewriter {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl ExternalRewriter {
    pub fn new(program: impl Into<String>, args: Vec<String>, timeout: Duration) -> Self {
        ExternalRewriter {
            program: program.into(),
            args,
            timeout,
        }
    }

    /// Split a command line on whitespace: program followed by arguments.
    pub fn from_command_line(command: &str, timeout: Duration) -> Result<Self> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts
            .next()
            .ok_or_else(|| Error::Plugin("empty plugin command".into()))?;
        Ok(Self::new(program, parts.collect(), timeout))
    }

    fn run(&self, input: Vec<u8>) -> Result<Vec<u8>> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Plugin(format!("cannot start {:?}: {e}", self.program)))?;

        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = thread::spawn(move || {
            // A plugin may exit without reading everything; that surfaces
            // through its exit status, not here.
            let _ = stdin.write_all(&input);
        });
        let mut stdout = child.stdout.take().expect("piped stdout");
        let reader = thread::spawn(move || {
            let mut buf = Vec::new();
            stdout.read_to_end(&mut buf).map(|_| buf)
        });
        let mut stderr = child.stderr.take().expect("piped stderr");
        let err_reader = thread::spawn(move || {
            let mut buf = String::new();
            let _ = stderr.read_to_string(&mut buf);
            buf
        });

        let deadline = Instant::now() + self.timeout;
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break status,
                Ok(None) if Instant::now() >= deadline => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(Error::Plugin(format!(
                        "{:?} timed out after {:?}",
                        self.program, self.timeout
                    )));
                }
                Ok(None) => thread::sleep(Duration::from_millis(5)),
                Err(e) => return Err(Error::Plugin(format!("waiting for plugin: {e}"))),
            }
        };
        let _ = writer.join();
        let stderr = err_reader.join().unwrap_or_default();
        if !status.success() {
            return Err(Error::Plugin(format!(
                "{:?} exited with {status}: {}",
                self.program,
                stderr.trim()
            )));
        }
        reader
            .join()
            .map_err(|_| Error::Plugin("stdout reader panicked".into()))?
            .map_err(|e| Error::Plugin(format!("reading plugin output: {e}")))
    }
}

impl SentenceRewriter for ExternalRewriter {
    fn rewrite(&self, batch: &[(&str, &str)]) -> Result<Vec<Rewrite>> {
        if batch.is_empty() {
            return Ok(Vec::new());
        }
        let mut input = Vec::new();
        for &(id, text) in batch {
            serde_json::to_writer(&mut input, &Request { id, text })?;
            input.push(b'\n');
        }
        let output = self.run(input)?;
        let output = String::from_utf8(output)
            .map_err(|_| Error::Plugin("plugin output is not UTF-8".into()))?;
        let mut by_id: HashMap<String, Response> = HashMap::new();
        for (i, line) in output.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let resp: Response = serde_json::from_str(line)
                .map_err(|e| Error::Plugin(format!("output line {}: {e}", i + 1)))?;
            by_id.insert(resp.id.clone(), resp);
        }
        let out = batch
            .iter()
            .map(|&(id, text)| {
                let resp = by_id
                    .remove(id)
                    .ok_or_else(|| Error::Plugin(format!("no output for sentence {id}")))?;
                if !resp.changed && resp.text != text {
                    return Err(Error::Plugin(format!(
                        "sentence {id} reported unchanged but its text differs"
                    )));
                }
                Ok(Rewrite {
                    text: resp.text,
                    changed: resp.changed,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(extra) = by_id.keys().next() {
            return Err(Error::Plugin(format!(
                "output for unknown sentence {extra}"
            )));
        }
        Ok(out)
    }
}

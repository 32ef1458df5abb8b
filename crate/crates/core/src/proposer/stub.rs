use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};

use serde_json::json;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubResponse {
    pub status: u16,
    pub body: String,
}

impl StubResponse {
    pub fn status(status: u16) -> Self {
        Self {
            status,
            body: json!({"error": {"message": "stub failure"}}).to_string(),
        }
    }

    /// A chat-completion body with one choice per content string.
    pub fn chat<S: AsRef<str>>(contents: &[S]) -> Self {
        let choices: Vec<_> = contents
            .iter()
            .enumerate()
            .map(|(i, c)| json!({"index": i, "message": {"role": "assistant", "content": c.as_ref()}}))
            .collect();
        Self {
            status: 200,
            body: json!({"object": "chat.completion", "choices": choices}).to_string(),
        }
    }
}

/// Minimal local HTTP server answering POSTs from a scripted queue; the
/// last response repeats once the queue is drained.
pub struct StubServer {
    addr: SocketAddr,
    requests: Arc<AtomicU64>,
    bodies: Arc<Mutex<Vec<String>>>,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start(responses: Vec<StubResponse>) -> std::io::Result<Self> {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let requests = Arc::new(AtomicU64::new(0));
        let bodies = Arc::new(Mutex::new(Vec::new()));
        let stop = Arc::new(AtomicBool::new(false));
        let handle = {
            let (requests, bodies, stop) = (requests.clone(), bodies.clone(), stop.clone());
            thread::spawn(move || {
                let mut queue = responses;
                for stream in listener.incoming() {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let response = if queue.len() > 1 {
                        queue.remove(0)
                    } else {
                        queue.first().cloned().unwrap_or_else(|| StubResponse::status(404))
                    };
                    if let Ok(body) = serve(stream, &response) {
                        requests.fetch_add(1, Ordering::SeqCst);
                        bodies.lock().unwrap().push(body);
                    }
                }
            })
        };
        Ok(Self {
            addr,
            requests,
            bodies,
            stop,
            handle: Some(handle),
        })
    }

    /// Base URL to use as the oracle endpoint.
    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn requests(&self) -> u64 {
        self.requests.load(Ordering::SeqCst)
    }

    /// Request bodies received so far.
    pub fn received(&self) -> Vec<String> {
        self.bodies.lock().unwrap().clone()
    }
}

fn serve(stream: TcpStream, response: &StubResponse) -> std::io::Result<String> {
    let mut reader = BufReader::new(stream);
    let mut content_length = 0usize;
    let mut line = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        let trimmed = line.trim_end();
        if trimmed.is_empty() {
            break;
        }
        if let Some((name, value)) = trimmed.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                content_length = value.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0; content_length];
    reader.read_exact(&mut body)?;

    let mut stream = reader.into_inner();
    write!(
        stream,
        "HTTP/1.1 {} Stub\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
        response.status,
        response.body.len(),
        response.body
    )?;
    stream.flush()?;
    Ok(String::from_utf8_lossy(&body).into_owned())
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

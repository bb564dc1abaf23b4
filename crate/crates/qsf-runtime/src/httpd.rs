//! Minimal HTTP/1.1 server with a deterministic lifecycle.
//!
//! Services here get deployed, torn down and redeployed on the same port,
//! so the server is built around that: one request per connection (every
//! response carries `Connection: close` and the socket really closes),
//! thread-per-connection handling with socket timeouts, and a shutdown that
//! closes the listener, drains in-flight handlers, and only then returns —
//! the port is free for rebinding the moment `shutdown()` completes.
//!
//! The accepted subset is deliberately small: request line, headers,
//! `Content-Length` bodies (with `Expect: 100-continue` support). Chunked
//! uploads are rejected with 411.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{Shutdown, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

const MAX_HEADER_BYTES: usize = 16 * 1024;
const MAX_BODY_BYTES: usize = 1 << 20;
const SOCKET_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug)]
pub struct HttpRequest {
    pub method: String,
    pub path: String,
    pub body: String,
}

#[derive(Debug)]
pub struct HttpResponse {
    pub status: u16,
    pub content_type: &'static str,
    pub body: String,
}

impl HttpResponse {
    pub fn json(status: u16, body: String) -> Self {
        Self {
            status,
            content_type: "application/json",
            body,
        }
    }

    pub fn yaml(body: String) -> Self {
        Self {
            status: 200,
            content_type: "application/yaml",
            body,
        }
    }
}

pub type Handler = dyn Fn(HttpRequest) -> HttpResponse + Send + Sync;

struct Draining {
    active: Mutex<usize>,
    done: Condvar,
}

impl Draining {
    fn enter(&self) {
        *self.active.lock().expect("drain counter") += 1;
    }

    fn leave(&self) {
        let mut active = self.active.lock().expect("drain counter");
        *active -= 1;
        if *active == 0 {
            self.done.notify_all();
        }
    }

    fn wait_empty(&self) {
        let mut active = self.active.lock().expect("drain counter");
        while *active > 0 {
            active = self.done.wait(active).expect("drain counter");
        }
    }
}

/// A bound, serving HTTP listener. `shutdown()` (or drop) closes the port
/// and drains in-flight requests before returning.
pub struct HttpServer {
    port: u16,
    closing: Arc<AtomicBool>,
    draining: Arc<Draining>,
    accept_thread: Option<JoinHandle<()>>,
}

#[derive(Debug)]
pub enum BindError {
    PortInUse(u16),
    Io(std::io::Error),
}

impl std::fmt::Display for BindError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BindError::PortInUse(p) => write!(f, "port {p} is already in use"),
            BindError::Io(e) => write!(f, "bind failed: {e}"),
        }
    }
}

impl std::error::Error for BindError {}

pub fn serve(port: u16, handler: Arc<Handler>) -> Result<HttpServer, BindError> {
    let listener = TcpListener::bind(("127.0.0.1", port)).map_err(|e| {
        if e.kind() == std::io::ErrorKind::AddrInUse {
            BindError::PortInUse(port)
        } else {
            BindError::Io(e)
        }
    })?;
    let port = listener.local_addr().map_err(BindError::Io)?.port();
    let closing = Arc::new(AtomicBool::new(false));
    let draining = Arc::new(Draining {
        active: Mutex::new(0),
        done: Condvar::new(),
    });

    let accept_closing = Arc::clone(&closing);
    let accept_draining = Arc::clone(&draining);
    let accept_thread = std::thread::spawn(move || {
        for stream in listener.incoming() {
            if accept_closing.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            let handler = Arc::clone(&handler);
            let draining = Arc::clone(&accept_draining);
            draining.enter();
            std::thread::spawn(move || {
                handle_connection(stream, &handler);
                draining.leave();
            });
        }
        // Listener drops here: the port is closed before shutdown() returns.
    });

    Ok(HttpServer {
        port,
        closing,
        draining,
        accept_thread: Some(accept_thread),
    })
}

impl HttpServer {
    pub fn port(&self) -> u16 {
        self.port
    }

    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        if self.closing.swap(true, Ordering::SeqCst) {
            return;
        }
        // Wake the accept loop with a throwaway connection.
        let _ = TcpStream::connect(("127.0.0.1", self.port));
        if let Some(thread) = self.accept_thread.take() {
            let _ = thread.join();
        }
        self.draining.wait_empty();
    }
}

impl Drop for HttpServer {
    fn drop(&mut self) {
        self.stop();
    }
}

fn handle_connection(stream: TcpStream, handler: &Arc<Handler>) {
    let _ = stream.set_read_timeout(Some(SOCKET_TIMEOUT));
    let _ = stream.set_write_timeout(Some(SOCKET_TIMEOUT));
    let response = match read_request(&stream) {
        Ok(Some(request)) => handler(request),
        Ok(None) => return, // bare connect with no data (shutdown wakeup)
        Err(status) => HttpResponse::json(
            status,
            format!(r#"{{"code":"E_BAD_REQUEST","message":"malformed HTTP request ({status})"}}"#),
        ),
    };
    write_response(&stream, &response);
    let _ = stream.shutdown(Shutdown::Both);
}

/// Reads one request. `Ok(None)` means the peer closed without sending
/// anything; `Err(status)` selects an error response.
fn read_request(stream: &TcpStream) -> Result<Option<HttpRequest>, u16> {
    // The whole request is read through a hard cap, so a runaway header
    // line cannot balloon memory; it just hits EOF and fails the size check.
    let limit = (MAX_HEADER_BYTES + MAX_BODY_BYTES + 1) as u64;
    let mut reader = BufReader::new(Read::take(stream, limit));

    let mut request_line = String::new();
    match read_crlf_line(&mut reader, &mut request_line) {
        Ok(0) => return Ok(None),
        Ok(_) => {}
        Err(_) => return Ok(None),
    }
    if request_line.len() > MAX_HEADER_BYTES {
        return Err(431);
    }
    let mut parts = request_line.split_whitespace();
    let (Some(method), Some(path), Some(version)) = (parts.next(), parts.next(), parts.next())
    else {
        return Err(400);
    };
    if !version.starts_with("HTTP/1.") {
        return Err(505);
    }

    let mut content_length: usize = 0;
    let mut expects_continue = false;
    let mut chunked = false;
    let mut header_bytes = request_line.len();
    loop {
        let mut line = String::new();
        read_crlf_line(&mut reader, &mut line).map_err(|_| 408u16)?;
        header_bytes += line.len();
        if header_bytes > MAX_HEADER_BYTES {
            return Err(431);
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        let Some((name, value)) = line.split_once(':') else {
            continue;
        };
        let name = name.trim().to_ascii_lowercase();
        let value = value.trim();
        match name.as_str() {
            "content-length" => content_length = value.parse().map_err(|_| 400u16)?,
            "expect" => expects_continue = value.eq_ignore_ascii_case("100-continue"),
            "transfer-encoding" => chunked = value.to_ascii_lowercase().contains("chunked"),
            _ => {}
        }
    }
    if chunked {
        return Err(411);
    }
    if content_length > MAX_BODY_BYTES {
        return Err(413);
    }
    if expects_continue {
        let mut w = stream;
        let _ = w.write_all(b"HTTP/1.1 100 Continue\r\n\r\n");
        let _ = w.flush();
    }

    let mut body_bytes = vec![0u8; content_length];
    reader.read_exact(&mut body_bytes).map_err(|_| 400u16)?;
    let body = String::from_utf8(body_bytes).map_err(|_| 400u16)?;

    Ok(Some(HttpRequest {
        method: method.to_ascii_uppercase(),
        path: path.to_string(),
        body,
    }))
}

/// `BufRead::read_line` accepts bare `\n`, which is fine for this subset.
fn read_crlf_line(
    reader: &mut BufReader<std::io::Take<&TcpStream>>,
    buf: &mut String,
) -> std::io::Result<usize> {
    reader.read_line(buf)
}

fn reason(status: u16) -> &'static str {
    match status {
        200 => "OK",
        201 => "Created",
        400 => "Bad Request",
        404 => "Not Found",
        405 => "Method Not Allowed",
        408 => "Request Timeout",
        411 => "Length Required",
        413 => "Payload Too Large",
        431 => "Request Header Fields Too Large",
        502 => "Bad Gateway",
        505 => "HTTP Version Not Supported",
        _ => "",
    }
}

fn write_response(mut stream: &TcpStream, response: &HttpResponse) {
    let head = format!(
        "HTTP/1.1 {} {}\r\nContent-Type: {}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n",
        response.status,
        reason(response.status),
        response.content_type,
        response.body.len(),
    );
    let _ = stream.write_all(head.as_bytes());
    let _ = stream.write_all(response.body.as_bytes());
    let _ = stream.flush();
}

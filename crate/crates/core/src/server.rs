//! Transports for the engine protocol: stdio, TCP, and a small HTTP server
//! for static front-end assets with a `POST /rpc` endpoint.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::{Component, Path, PathBuf};
use std::thread;

use crate::protocol::handle_line;

/// Answers request lines from `input` until end of stream.
pub fn serve_lines<R: BufRead, W: Write>(input: R, mut output: W) -> io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(output, "{}", handle_line(&line))?;
        output.flush()?;
    }
    Ok(())
}

/// Newline-delimited JSON over TCP, one thread per connection.
pub fn serve_tcp(listener: TcpListener) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        thread::spawn(move || {
            let reader = match stream.try_clone() {
                Ok(s) => BufReader::new(s),
                Err(_) => return,
            };
            let _ = serve_lines(reader, stream);
        });
    }
    Ok(())
}

/// Static files from `root` on `GET`, protocol lines on `POST /rpc`.
pub fn serve_http(listener: TcpListener, root: PathBuf) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let root = root.clone();
        thread::spawn(move || {
            let _ = handle_http(stream, &root);
        });
    }
    Ok(())
}

pub fn bind(host: &str, port: u16) -> io::Result<(TcpListener, SocketAddr)> {
    let listener = TcpListener::bind((host, port))?;
    let addr = listener.local_addr()?;
    Ok((listener, addr))
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "html" | "htm" => "text/html; charset=utf-8",
        "js" | "mjs" => "text/javascript; charset=utf-8",
        "css" => "text/css; charset=utf-8",
        "json" => "application/json",
        "svg" => "image/svg+xml",
        "png" => "image/png",
        "wasm" => "application/wasm",
        "txt" => "text/plain; charset=utf-8",
        _ => "application/octet-stream",
    }
}

/// Resolves a request path inside `root`, refusing anything that climbs out.
fn resolve(root: &Path, url_path: &str) -> Option<PathBuf> {
    let path = url_path.split(['?', '#']).next().unwrap_or("/");
    let rel = Path::new(path.trim_start_matches('/'));
    if rel.components().any(|c| !matches!(c, Component::Normal(_))) {
        return None;
    }
    let mut full = root.join(rel);
    if full.is_dir() {
        full = full.join("index.html");
    }
    full.is_file().then_some(full)
}

fn respond(stream: &mut TcpStream, status: &str, ctype: &str, body: &[u8]) -> io::Result<()> {
    write!(stream, "HTTP/1.1 {status}\r\nContent-Type: {ctype}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n", body.len())?;
    stream.write_all(body)?;
    stream.flush()
}

fn handle_http(mut stream: TcpStream, root: &Path) -> io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line)?;
    let mut parts = request_line.split_whitespace();
    let (method, target) = (parts.next().unwrap_or(""), parts.next().unwrap_or("/"));
    let mut length = 0usize;
    loop {
        let mut h = String::new();
        if reader.read_line(&mut h)? == 0 || h.trim().is_empty() {
            break;
        }
        if let Some((k, v)) = h.split_once(':') {
            if k.trim().eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    match (method, target) {
        ("POST", "/rpc") => {
            let mut body = vec![0u8; length];
            reader.read_exact(&mut body)?;
            let text = String::from_utf8_lossy(&body);
            let mut out = Vec::new();
            serve_lines(text.as_bytes(), &mut out)?;
            respond(&mut stream, "200 OK", "application/x-ndjson", &out)
        }
        ("GET", t) => match resolve(root, t) {
            Some(path) => {
                let body = fs::read(&path)?;
                respond(&mut stream, "200 OK", content_type(&path), &body)
            }
            None => respond(&mut stream, "404 Not Found", "text/plain; charset=utf-8", b"not found\n"),
        },
        _ => respond(&mut stream, "405 Method Not Allowed", "text/plain; charset=utf-8", b"method not allowed\n"),
    }
}

//! mbox reader: split on "From " separator lines and delegate to the EML
//! parser. A message that fails to parse becomes a warning, never an abort.

use std::io::{BufRead, BufReader, Read};

use super::eml::{parse_eml_with, IngestOptions};
use super::Message;
use crate::error::Result;

/// A skipped mbox entry, with the byte offset where it started.
#[derive(Debug, Clone)]
pub struct MboxWarning {
    pub byte_offset: u64,
    pub reason: String,
}

impl std::fmt::Display for MboxWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "mbox entry at byte {}: {}", self.byte_offset, self.reason)
    }
}

pub fn parse_mbox<R: Read>(reader: R) -> Result<(Vec<Message>, Vec<MboxWarning>)> {
    parse_mbox_with(reader, &IngestOptions::default())
}

pub fn parse_mbox_with<R: Read>(
    reader: R,
    opts: &IngestOptions,
) -> Result<(Vec<Message>, Vec<MboxWarning>)> {
    let mut reader = BufReader::new(reader);
    let mut messages = Vec::new();
    let mut warnings = Vec::new();

    let mut current: Vec<u8> = Vec::new();
    let mut current_offset: u64 = 0;
    let mut offset: u64 = 0;
    let mut line: Vec<u8> = Vec::new();
    loop {
        line.clear();
        let n = reader.read_until(b'\n', &mut line)?;
        if n == 0 {
            break;
        }
        if line.starts_with(b"From ") {
            flush(&mut current, current_offset, opts, &mut messages, &mut warnings);
            current_offset = offset;
        } else {
            // unescape the traditional ">From " quoting
            let payload: &[u8] = line.strip_prefix(b">").filter(|r| r.starts_with(b"From ")).unwrap_or(&line);
            current.extend_from_slice(payload);
        }
        offset += n as u64;
    }
    flush(&mut current, current_offset, opts, &mut messages, &mut warnings);
    Ok((messages, warnings))
}

fn flush(
    buf: &mut Vec<u8>,
    offset: u64,
    opts: &IngestOptions,
    messages: &mut Vec<Message>,
    warnings: &mut Vec<MboxWarning>,
) {
    if buf.iter().all(|b| b.is_ascii_whitespace()) {
        buf.clear();
        return;
    }
    match parse_eml_with(buf, opts) {
        Ok(msg) => messages.push(msg),
        Err(e) => warnings.push(MboxWarning {
            byte_offset: offset,
            reason: e.to_string(),
        }),
    }
    buf.clear();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(id: &str, date: &str) -> String {
        format!(
            "From alice@example.com Mon Feb  5 09:00:00 2018\n\
From: alice@example.com\n\
To: bob@example.com\n\
{date}\
Subject: hello\n\
Message-ID: <{id}>\n\
\n\
body\n"
        )
    }

    #[test]
    fn empty_stream_yields_nothing() {
        let (msgs, warns) = parse_mbox(&b""[..]).unwrap();
        assert!(msgs.is_empty());
        assert!(warns.is_empty());
    }

    #[test]
    fn three_entries_in_file_order() {
        let data = entry("m1@x", "Date: Mon, 05 Feb 2018 09:00:00 +0000\n")
            + &entry("m2@x", "Date: Mon, 05 Feb 2018 10:00:00 +0000\n")
            + &entry("m3@x", "Date: Mon, 05 Feb 2018 11:00:00 +0000\n");
        let (msgs, warns) = parse_mbox(data.as_bytes()).unwrap();
        assert!(warns.is_empty());
        let ids: Vec<&str> = msgs.iter().map(|m| m.id.as_str()).collect();
        assert_eq!(ids, ["m1@x", "m2@x", "m3@x"]);
    }

    #[test]
    fn dateless_entry_becomes_warning_with_offset() {
        let good = entry("m1@x", "Date: Mon, 05 Feb 2018 09:00:00 +0000\n");
        let bad = entry("m2@x", "");
        let good2 = entry("m3@x", "Date: Mon, 05 Feb 2018 11:00:00 +0000\n");
        let data = format!("{good}{bad}{good2}");
        let (msgs, warns) = parse_mbox(data.as_bytes()).unwrap();
        assert_eq!(msgs.len(), 2);
        assert_eq!(warns.len(), 1);
        assert_eq!(warns[0].byte_offset, good.len() as u64);
        assert!(warns[0].reason.contains("date"));
    }
}

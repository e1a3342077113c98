//! RFC 5322 header parsing plus the thin slice of MIME this pipeline needs:
//! attachment file names and `text/calendar` parts.

use chrono::{DateTime, Utc};
use regex::Regex;
use sha2::{Digest, Sha256};
use std::sync::OnceLock;

use super::ical::CalendarPart;
use super::{Interlocutor, Message, MessageKind};
use crate::error::{CcdpError, Result};

/// Ingestion knobs for meeting classification.
#[derive(Debug, Clone)]
pub struct IngestOptions {
    /// When true, a calendar part only makes a message a Meeting or
    /// MeetingNotification if its LOCATION or DESCRIPTION matches
    /// `conference_pattern` (the service under study only tracks meetings
    /// with a teleconference link).
    pub require_conference_link: bool,
    /// Pattern identifying a conferencing link; the default matches any URL.
    pub conference_pattern: Regex,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            require_conference_link: false,
            conference_pattern: Regex::new(r"https?://\S+").unwrap(),
        }
    }
}

/// Parse one RFC 5322 message with default options.
pub fn parse_eml(raw: &[u8]) -> Result<Message> {
    parse_eml_with(raw, &IngestOptions::default())
}

pub fn parse_eml_with(raw: &[u8], opts: &IngestOptions) -> Result<Message> {
    let text = String::from_utf8_lossy(raw);
    let (header_block, body) = split_headers(&text);
    let headers = parse_headers(header_block);

    let from_raw = header(&headers, "from")
        .ok_or_else(|| CcdpError::MalformedHeaders("missing From header".into()))?;
    let from = Interlocutor::parse(from_raw)?;
    let date_raw = header(&headers, "date")
        .ok_or_else(|| CcdpError::UnparseableDate("missing Date header".into()))?;
    let sent_at = parse_date(date_raw)?;

    let to = parse_address_list(header(&headers, "to").unwrap_or(""))?;
    let cc = parse_address_list(header(&headers, "cc").unwrap_or(""))?;
    let subject = header(&headers, "subject").unwrap_or("").trim().to_string();
    let references = parse_msg_id_list(header(&headers, "references").unwrap_or(""));
    let in_reply_to = parse_msg_id_list(header(&headers, "in-reply-to").unwrap_or(""))
        .into_iter()
        .next();

    let id = match header(&headers, "message-id") {
        Some(v) => parse_msg_id_list(v)
            .into_iter()
            .next()
            .unwrap_or_else(|| synthesize_id(raw)),
        None => synthesize_id(raw),
    };

    let content_type = header(&headers, "content-type").unwrap_or("text/plain");
    let mut mime = MimeScan::default();
    scan_part(content_type, body, &mut mime, 0);

    let (kind, ical_uid) = classify_kind_with(&mime.calendar_parts, opts);

    Ok(Message {
        id,
        kind,
        from,
        to,
        cc,
        sent_at,
        subject,
        attachments: mime.attachment_names,
        references,
        in_reply_to,
        ical_uid,
        body: body.to_string(),
    })
}

/// Classify a message from its calendar parts: METHOD REQUEST/REPLY/CANCEL
/// means meeting notification, METHOD absent or PUBLISH means a calendar
/// meeting entry, anything else is plain email. A part without a UID never
/// changes the kind.
pub fn classify_kind(calendar_parts: &[CalendarPart]) -> MessageKind {
    classify_kind_with(calendar_parts, &IngestOptions::default()).0
}

fn classify_kind_with(
    calendar_parts: &[CalendarPart],
    opts: &IngestOptions,
) -> (MessageKind, Option<String>) {
    for part in calendar_parts {
        let Some(uid) = &part.uid else { continue };
        if opts.require_conference_link {
            let haystack = [part.location.as_deref(), part.description.as_deref()];
            let linked = haystack
                .iter()
                .flatten()
                .any(|text| opts.conference_pattern.is_match(text));
            if !linked {
                continue;
            }
        }
        match part.method.as_deref() {
            Some("REQUEST") | Some("REPLY") | Some("CANCEL") => {
                return (MessageKind::MeetingNotification, Some(uid.clone()))
            }
            None | Some("PUBLISH") => return (MessageKind::Meeting, Some(uid.clone())),
            Some(_) => continue,
        }
    }
    (MessageKind::Email, None)
}

#[derive(Default)]
struct MimeScan {
    attachment_names: Vec<String>,
    calendar_parts: Vec<CalendarPart>,
}

/// Walk a MIME part (recursing into multiparts), collecting attachment file
/// names and calendar parts. Bodies are not decoded; only headers and
/// text/calendar content are read.
fn scan_part(content_type: &str, body: &str, out: &mut MimeScan, depth: usize) {
    if depth > 8 {
        return;
    }
    let ct = content_type.to_ascii_lowercase();
    if ct.trim_start().starts_with("multipart/") {
        if let Some(boundary) = content_type_param(content_type, "boundary") {
            for sub in split_multipart(body, &boundary) {
                let (sub_headers_block, sub_body) = split_headers(sub);
                let sub_headers = parse_headers(sub_headers_block);
                let sub_ct = header(&sub_headers, "content-type")
                    .unwrap_or("text/plain")
                    .to_string();
                if let Some(name) = part_filename(&sub_headers, &sub_ct) {
                    out.attachment_names.push(name);
                }
                scan_part(&sub_ct, sub_body, out, depth + 1);
            }
        }
    } else if ct.trim_start().starts_with("text/calendar") {
        out.calendar_parts.push(CalendarPart::parse(body));
    }
}

fn part_filename(headers: &[(String, String)], content_type: &str) -> Option<String> {
    if let Some(cd) = header(headers, "content-disposition") {
        if let Some(name) = content_type_param(cd, "filename") {
            return Some(name);
        }
    }
    content_type_param(content_type, "name")
}

fn split_multipart<'a>(body: &'a str, boundary: &str) -> Vec<&'a str> {
    let delim = format!("--{boundary}");
    let mut parts = Vec::new();
    let mut sections = body.split(delim.as_str());
    sections.next(); // preamble
    for section in sections {
        if section.starts_with("--") {
            break; // closing delimiter
        }
        let section = section.strip_prefix("\r\n").or_else(|| section.strip_prefix('\n')).unwrap_or(section);
        parts.push(section);
    }
    parts
}

/// Split raw text into the header block and the body at the first blank line.
fn split_headers(text: &str) -> (&str, &str) {
    for sep in ["\r\n\r\n", "\n\n"] {
        if let Some(pos) = text.find(sep) {
            return (&text[..pos], &text[pos + sep.len()..]);
        }
    }
    (text, "")
}

/// Unfold and split a header block into (lowercased-name, value) pairs.
fn parse_headers(block: &str) -> Vec<(String, String)> {
    let mut headers: Vec<(String, String)> = Vec::new();
    for raw in block.lines() {
        if raw.starts_with(' ') || raw.starts_with('\t') {
            if let Some((_, value)) = headers.last_mut() {
                value.push(' ');
                value.push_str(raw.trim());
            }
        } else if let Some((name, value)) = raw.split_once(':') {
            headers.push((name.trim().to_ascii_lowercase(), value.trim().to_string()));
        }
    }
    headers
}

fn header<'a>(headers: &'a [(String, String)], name: &str) -> Option<&'a str> {
    headers
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v.as_str())
}

fn content_type_param(value: &str, param: &str) -> Option<String> {
    for piece in value.split(';').skip(1) {
        let (key, val) = piece.split_once('=')?;
        if key.trim().eq_ignore_ascii_case(param) {
            return Some(val.trim().trim_matches('"').to_string());
        }
    }
    None
}

/// Split a comma-separated address list, respecting quoted display names.
fn parse_address_list(value: &str) -> Result<Vec<Interlocutor>> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;
    for c in value.chars() {
        match c {
            '"' => {
                in_quotes = !in_quotes;
                current.push(c);
            }
            ',' if !in_quotes => {
                if !current.trim().is_empty() {
                    out.push(Interlocutor::parse(&current)?);
                }
                current.clear();
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        out.push(Interlocutor::parse(&current)?);
    }
    Ok(out)
}

/// Extract `<...>` message ids; falls back to whitespace tokens.
fn parse_msg_id_list(value: &str) -> Vec<String> {
    static ANGLED: OnceLock<Regex> = OnceLock::new();
    let re = ANGLED.get_or_init(|| Regex::new(r"<([^<>]+)>").unwrap());
    let angled: Vec<String> = re
        .captures_iter(value)
        .map(|c| c[1].trim().to_string())
        .collect();
    if !angled.is_empty() {
        return angled;
    }
    value.split_whitespace().map(str::to_string).collect()
}

fn parse_date(value: &str) -> Result<DateTime<Utc>> {
    if let Ok(dt) = DateTime::parse_from_rfc2822(value) {
        return Ok(dt.with_timezone(&Utc));
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(value) {
        return Ok(dt.with_timezone(&Utc));
    }
    Err(CcdpError::UnparseableDate(value.to_string()))
}

fn synthesize_id(raw: &[u8]) -> String {
    let digest = Sha256::digest(raw);
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("synthetic-{hex}@ccdp.local")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &[u8] = b"From: Alice <alice@example.com>\r\n\
To: bob@example.com\r\n\
Date: Mon, 05 Feb 2018 09:00:00 +0000\r\n\
Subject: Closure Project Gamma\r\n\
Message-ID: <a1@example.com>\r\n\
\r\n\
Please close the project.\r\n";

    #[test]
    fn minimal_message_parses_as_email() {
        let m = parse_eml(MINIMAL).unwrap();
        assert_eq!(m.id, "a1@example.com");
        assert_eq!(m.kind, MessageKind::Email);
        assert_eq!(m.from.as_str(), "alice@example.com");
        assert_eq!(m.to.len(), 1);
        assert!(m.attachments.is_empty());
        assert!(m.ical_uid.is_none());
        assert_eq!(m.subject, "Closure Project Gamma");
    }

    #[test]
    fn missing_date_is_rejected() {
        let raw = b"From: alice@example.com\r\nTo: bob@example.com\r\n\r\nhi";
        match parse_eml(raw) {
            Err(CcdpError::UnparseableDate(_)) => {}
            other => panic!("expected UnparseableDate, got {other:?}"),
        }
    }

    #[test]
    fn missing_from_is_rejected() {
        let raw = b"To: bob@example.com\r\nDate: Mon, 05 Feb 2018 09:00:00 +0000\r\n\r\nhi";
        assert!(matches!(parse_eml(raw), Err(CcdpError::MalformedHeaders(_))));
    }

    fn invite_eml(method: &str) -> Vec<u8> {
        format!(
            "From: dave@example.com\r\n\
To: carol@example.com\r\n\
Date: Tue, 27 Mar 2018 08:30:00 +0000\r\n\
Subject: Teleconference request\r\n\
Message-ID: <c1@example.com>\r\n\
Content-Type: multipart/mixed; boundary=\"XYZ\"\r\n\
\r\n\
--XYZ\r\n\
Content-Type: text/plain\r\n\
\r\n\
see invite\r\n\
--XYZ\r\n\
Content-Type: text/calendar; method={method}\r\n\
\r\n\
BEGIN:VCALENDAR\r\n\
METHOD:{method}\r\n\
BEGIN:VEVENT\r\n\
UID:call-1@example.com\r\n\
LOCATION:https://conf.example.com/1\r\n\
END:VEVENT\r\n\
END:VCALENDAR\r\n\
--XYZ--\r\n"
        )
        .into_bytes()
    }

    #[test]
    fn calendar_request_is_meeting_notification() {
        let m = parse_eml(&invite_eml("REQUEST")).unwrap();
        assert_eq!(m.kind, MessageKind::MeetingNotification);
        assert_eq!(m.ical_uid.as_deref(), Some("call-1@example.com"));
    }

    #[test]
    fn calendar_publish_is_meeting() {
        let m = parse_eml(&invite_eml("PUBLISH")).unwrap();
        assert_eq!(m.kind, MessageKind::Meeting);
        assert_eq!(m.ical_uid.as_deref(), Some("call-1@example.com"));
    }

    #[test]
    fn conference_link_restriction_filters_plain_meetings() {
        let raw = invite_eml("REQUEST");
        let text = String::from_utf8(raw).unwrap().replace(
            "LOCATION:https://conf.example.com/1\r\n",
            "LOCATION:Room 4B\r\n",
        );
        let opts = IngestOptions {
            require_conference_link: true,
            ..IngestOptions::default()
        };
        let m = parse_eml_with(text.as_bytes(), &opts).unwrap();
        assert_eq!(m.kind, MessageKind::Email);
        // permissive default keeps it a notification
        let m2 = parse_eml(text.as_bytes()).unwrap();
        assert_eq!(m2.kind, MessageKind::MeetingNotification);
    }

    #[test]
    fn attachment_filenames_are_collected() {
        let raw = b"From: carol@example.com\r\n\
To: bob@example.com\r\n\
Date: Tue, 20 Feb 2018 10:00:00 +0000\r\n\
Subject: RE: Closure Project Gamma\r\n\
References: <a1@example.com> <a2@example.com>\r\n\
In-Reply-To: <a2@example.com>\r\n\
Content-Type: multipart/mixed; boundary=\"B1\"\r\n\
\r\n\
--B1\r\n\
Content-Type: text/plain\r\n\
\r\n\
latest deck attached\r\n\
--B1\r\n\
Content-Type: application/vnd.ms-powerpoint; name=\"deck_final_v3.pptx\"\r\n\
Content-Disposition: attachment; filename=\"deck_final_v3.pptx\"\r\n\
\r\n\
(binary)\r\n\
--B1--\r\n";
        let m = parse_eml(raw).unwrap();
        assert_eq!(m.attachments, vec!["deck_final_v3.pptx"]);
        assert_eq!(m.references, vec!["a1@example.com", "a2@example.com"]);
        assert_eq!(m.in_reply_to.as_deref(), Some("a2@example.com"));
    }

    #[test]
    fn missing_message_id_gets_stable_synthetic_id() {
        let raw = b"From: alice@example.com\r\nTo: bob@example.com\r\nDate: Mon, 05 Feb 2018 09:00:00 +0000\r\n\r\nbody";
        let a = parse_eml(raw).unwrap();
        let b = parse_eml(raw).unwrap();
        assert_eq!(a.id, b.id);
        assert!(a.id.starts_with("synthetic-"));
    }
}

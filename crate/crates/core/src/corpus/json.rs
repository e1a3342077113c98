//! Fixture JSON corpus format: `{"messages": [...]}` with one object per
//! message, equivalent to parsing the same messages from EML.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Corpus, DuplicatePolicy, Message};
use crate::error::{CcdpError, Result};

#[derive(Serialize, Deserialize)]
struct CorpusFile {
    messages: Vec<Message>,
}

pub fn load_corpus_json(path: &Path) -> Result<(Corpus, Vec<String>)> {
    let data = std::fs::read_to_string(path)?;
    parse_corpus_json(&data)
}

pub fn parse_corpus_json(data: &str) -> Result<(Corpus, Vec<String>)> {
    let file: CorpusFile = serde_json::from_str(data).map_err(|e| CcdpError::SchemaViolation {
        path: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    for (i, m) in file.messages.iter().enumerate() {
        let meeting = matches!(
            m.kind,
            super::MessageKind::Meeting | super::MessageKind::MeetingNotification
        );
        if meeting && m.ical_uid.is_none() {
            return Err(CcdpError::SchemaViolation {
                path: format!("messages[{i}].ical_uid"),
                message: format!("message {} has kind {:?} but no ical_uid", m.id, m.kind),
            });
        }
    }
    Corpus::build(file.messages, DuplicatePolicy::Reject)
}

pub fn save_corpus_json(corpus: &Corpus, path: &Path) -> Result<()> {
    let file = CorpusFile {
        messages: corpus.messages().to_vec(),
    };
    let mut data = serde_json::to_string_pretty(&file).expect("corpus serialization");
    data.push('\n');
    std::fs::write(path, data)?;
    Ok(())
}

/// Serialize a corpus to the fixture JSON string (used by `ingest`).
pub fn corpus_to_json(corpus: &Corpus) -> String {
    let file = CorpusFile {
        messages: corpus.messages().to_vec(),
    };
    serde_json::to_string_pretty(&file).expect("corpus serialization")
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"{"messages": [{
        "id": "m1@x", "kind": "email",
        "from": "alice@example.com", "to": ["bob@example.com"], "cc": [],
        "sent_at": "2018-02-05T09:00:00Z", "subject": "hello",
        "attachments": [], "references": [], "in_reply_to": null,
        "ical_uid": null, "body": ""
    }]}"#;

    #[test]
    fn single_message_roundtrip() {
        let (corpus, warnings) = parse_corpus_json(ONE).unwrap();
        assert_eq!(corpus.len(), 1);
        assert!(warnings.is_empty());
        let back = corpus_to_json(&corpus);
        let (again, _) = parse_corpus_json(&back).unwrap();
        assert_eq!(corpus.messages(), again.messages());
    }

    #[test]
    fn duplicate_id_is_schema_violation() {
        let dup = ONE.replace("]}", r#", {
            "id": "m1@x", "kind": "email",
            "from": "carol@example.com", "to": ["bob@example.com"], "cc": [],
            "sent_at": "2018-02-05T10:00:00Z", "subject": "again",
            "attachments": [], "references": [], "in_reply_to": null,
            "ical_uid": null, "body": ""
        }]}"#);
        assert!(matches!(
            parse_corpus_json(&dup),
            Err(CcdpError::SchemaViolation { .. })
        ));
    }

    #[test]
    fn meeting_without_uid_is_schema_violation() {
        let bad = ONE.replace("\"kind\": \"email\"", "\"kind\": \"meeting\"");
        assert!(matches!(
            parse_corpus_json(&bad),
            Err(CcdpError::SchemaViolation { .. })
        ));
    }

    #[test]
    fn malformed_json_reports_location() {
        match parse_corpus_json("{\"messages\": [") {
            Err(CcdpError::SchemaViolation { path, .. }) => assert!(path.contains("line")),
            other => panic!("expected SchemaViolation, got {other:?}"),
        }
    }
}

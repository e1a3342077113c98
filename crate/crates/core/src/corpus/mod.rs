//! Canonical message model: normalized interlocutors, message kinds and the
//! id-indexed corpus that the rest of the pipeline reads.

mod eml;
mod ical;
mod json;
mod mbox;

pub use eml::{classify_kind, parse_eml};
pub use ical::CalendarPart;
pub use json::{corpus_to_json, load_corpus_json, parse_corpus_json, save_corpus_json};
pub use mbox::parse_mbox;

use std::collections::HashMap;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{CcdpError, Result};

/// A normalized email address. Display names and angle brackets are stripped
/// and the address is lowercased, so equality is plain byte equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Interlocutor(String);

impl Interlocutor {
    /// Parse a raw address field value like `"Alice Martin" <Alice@Example.com>`.
    pub fn parse(raw: &str) -> Result<Self> {
        let mut s = raw.trim();
        if let (Some(start), Some(end)) = (s.rfind('<'), s.rfind('>')) {
            if start < end {
                s = &s[start + 1..end];
            }
        }
        let addr = s.trim().trim_matches('"').to_lowercase();
        if addr.is_empty() || addr.chars().filter(|&c| c == '@').count() != 1 {
            return Err(CcdpError::MalformedHeaders(format!(
                "invalid address: {raw:?}"
            )));
        }
        Ok(Interlocutor(addr))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Interlocutor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Interlocutor {
    type Error = CcdpError;
    fn try_from(value: String) -> Result<Self> {
        Interlocutor::parse(&value)
    }
}

impl From<Interlocutor> for String {
    fn from(value: Interlocutor) -> String {
        value.0
    }
}

/// Role of an interlocutor in one message. `Absent` is only ever produced by
/// [`Message::role_of`]; it is never stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    From,
    To,
    Cc,
    Absent,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::From, Role::To, Role::Cc, Role::Absent];

    pub(crate) fn index(self) -> usize {
        match self {
            Role::From => 0,
            Role::To => 1,
            Role::Cc => 2,
            Role::Absent => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageKind {
    Email,
    Meeting,
    MeetingNotification,
}

/// One Internet message: email, calendar meeting entry, or meeting
/// notification (invite/acceptance/cancellation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub id: String,
    pub kind: MessageKind,
    pub from: Interlocutor,
    pub to: Vec<Interlocutor>,
    pub cc: Vec<Interlocutor>,
    pub sent_at: DateTime<Utc>,
    pub subject: String,
    #[serde(default)]
    pub attachments: Vec<String>,
    #[serde(default)]
    pub references: Vec<String>,
    #[serde(default)]
    pub in_reply_to: Option<String>,
    #[serde(default)]
    pub ical_uid: Option<String>,
    #[serde(default)]
    pub body: String,
}

impl Message {
    /// Role lookup with precedence From > To > Cc; anyone else is Absent.
    pub fn role_of(&self, who: &Interlocutor) -> Role {
        if &self.from == who {
            Role::From
        } else if self.to.contains(who) {
            Role::To
        } else if self.cc.contains(who) {
            Role::Cc
        } else {
            Role::Absent
        }
    }

    /// All interlocutors with a non-Absent role, in From, To, Cc order,
    /// deduplicated by the role precedence.
    pub fn interlocutors(&self) -> Vec<&Interlocutor> {
        let mut seen = vec![&self.from];
        for i in self.to.iter().chain(self.cc.iter()) {
            if !seen.contains(&i) {
                seen.push(i);
            }
        }
        seen
    }

    /// Messages sent to oneself do not constitute a collaboration and are
    /// excluded from ingestion.
    pub fn is_self_addressed(&self) -> bool {
        self.to.contains(&self.from) || self.cc.contains(&self.from)
    }

    /// All header-based thread references: `References:` ids plus In-Reply-To.
    pub fn thread_references(&self) -> impl Iterator<Item = &str> {
        self.references
            .iter()
            .map(String::as_str)
            .chain(self.in_reply_to.as_deref())
    }
}

/// How to treat a duplicate message id during corpus construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuplicatePolicy {
    /// Fail the whole load (fixture JSON: ids must be unique).
    Reject,
    /// Keep the first occurrence and warn (mixed-source ingestion).
    SkipWithWarning,
}

/// Immutable, id-indexed message collection. Iteration order is sorted by
/// `(sent_at, id)` so every downstream computation is deterministic.
#[derive(Debug, Clone)]
pub struct Corpus {
    messages: Vec<Message>,
    by_id: HashMap<String, usize>,
}

impl Corpus {
    /// Build a corpus, filtering self-addressed messages and handling
    /// duplicate ids per `policy`. Returns the corpus plus human-readable
    /// warnings for everything that was dropped.
    pub fn build(
        messages: Vec<Message>,
        policy: DuplicatePolicy,
    ) -> Result<(Corpus, Vec<String>)> {
        let mut warnings = Vec::new();
        let mut kept: Vec<Message> = Vec::with_capacity(messages.len());
        let mut by_id: HashMap<String, usize> = HashMap::new();
        for msg in messages {
            if msg.is_self_addressed() {
                warnings.push(format!("skipping self-addressed message {}", msg.id));
                continue;
            }
            if by_id.contains_key(&msg.id) {
                match policy {
                    DuplicatePolicy::Reject => {
                        return Err(CcdpError::SchemaViolation {
                            path: format!("messages[id={}]", msg.id),
                            message: "duplicate message id".into(),
                        })
                    }
                    DuplicatePolicy::SkipWithWarning => {
                        warnings.push(format!("duplicate message id {}, keeping first", msg.id));
                        continue;
                    }
                }
            }
            by_id.insert(msg.id.clone(), kept.len());
            kept.push(msg);
        }
        kept.sort_by(|a, b| (a.sent_at, &a.id).cmp(&(b.sent_at, &b.id)));
        let by_id = kept
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), i))
            .collect();
        Ok((Corpus { messages: kept, by_id }, warnings))
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Message> {
        self.by_id.get(id).map(|&i| &self.messages[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// Messages in (sent_at, id) order.
    pub fn messages(&self) -> &[Message] {
        &self.messages
    }
}

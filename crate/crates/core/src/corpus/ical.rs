//! Minimal iCalendar reader: only the properties that drive message-kind
//! classification and thread grouping (METHOD, UID, LOCATION, DESCRIPTION).

/// The interesting properties of one `text/calendar` MIME part.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CalendarPart {
    pub method: Option<String>,
    pub uid: Option<String>,
    pub location: Option<String>,
    pub description: Option<String>,
}

impl CalendarPart {
    /// Parse an iCalendar text body. Lines are unfolded per RFC 5545 (a line
    /// starting with space or tab continues the previous one); property
    /// parameters between the name and the value are ignored.
    pub fn parse(text: &str) -> CalendarPart {
        let mut part = CalendarPart::default();
        for line in unfold(text) {
            let Some((name, value)) = split_property(&line) else {
                continue;
            };
            let value = value.trim().to_string();
            if value.is_empty() {
                continue;
            }
            match name.to_ascii_uppercase().as_str() {
                "METHOD" => part.method.get_or_insert(value.to_ascii_uppercase()),
                "UID" => part.uid.get_or_insert(value),
                "LOCATION" => part.location.get_or_insert(value),
                "DESCRIPTION" => part.description.get_or_insert(value),
                _ => continue,
            };
        }
        part
    }
}

fn unfold(text: &str) -> Vec<String> {
    let mut lines: Vec<String> = Vec::new();
    for raw in text.lines() {
        if (raw.starts_with(' ') || raw.starts_with('\t')) && !lines.is_empty() {
            let cont = &raw[1..];
            lines.last_mut().unwrap().push_str(cont);
        } else {
            lines.push(raw.trim_end_matches('\r').to_string());
        }
    }
    lines
}

/// Split `NAME;PARAM=..:VALUE` into name and value, honoring quoted params.
fn split_property(line: &str) -> Option<(String, &str)> {
    let mut in_quotes = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_quotes = !in_quotes,
            ':' if !in_quotes => {
                let name_part = &line[..i];
                let name = name_part.split(';').next()?.trim();
                if name.is_empty() {
                    return None;
                }
                return Some((name.to_string(), &line[i + 1..]));
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    const INVITE: &str = "BEGIN:VCALENDAR\r\n\
METHOD:REQUEST\r\n\
BEGIN:VEVENT\r\n\
UID:call-42@example.com\r\n\
LOCATION:https://conf.example.com/room/42\r\n\
DESCRIPTION:Project closure\r\n\
\x20call\r\n\
END:VEVENT\r\n\
END:VCALENDAR\r\n";

    #[test]
    fn parses_invite_properties() {
        let p = CalendarPart::parse(INVITE);
        assert_eq!(p.method.as_deref(), Some("REQUEST"));
        assert_eq!(p.uid.as_deref(), Some("call-42@example.com"));
        assert_eq!(p.location.as_deref(), Some("https://conf.example.com/room/42"));
        // folded continuation line joined without the leading space
        assert_eq!(p.description.as_deref(), Some("Project closurecall"));
    }

    #[test]
    fn parameters_before_colon_are_ignored() {
        let p = CalendarPart::parse("UID;X-FOO=\"a:b\":meeting-1@example.com\n");
        assert_eq!(p.uid.as_deref(), Some("meeting-1@example.com"));
    }

    #[test]
    fn missing_properties_are_none() {
        let p = CalendarPart::parse("BEGIN:VCALENDAR\nEND:VCALENDAR\n");
        assert_eq!(p, CalendarPart::default());
    }
}

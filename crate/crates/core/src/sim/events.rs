//! Line-oriented event log.

use std::fmt::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Detect,
    Propose,
    Accept,
    Reject,
    Lock,
    Queue,
    Promote,
    Fire,
    Kill,
    Miss,
    Leak,
    Mode,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Detect => "DETECT",
            EventKind::Propose => "PROPOSE",
            EventKind::Accept => "ACCEPT",
            EventKind::Reject => "REJECT",
            EventKind::Lock => "LOCK",
            EventKind::Queue => "QUEUE",
            EventKind::Promote => "PROMOTE",
            EventKind::Fire => "FIRE",
            EventKind::Kill => "KILL",
            EventKind::Miss => "MISS",
            EventKind::Leak => "LEAK",
            EventKind::Mode => "MODE",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `t=<s> ev=<KIND> src=<id> dst=<id> data=<k:v,...>`; absent ids print
/// as `-`.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub src: String,
    pub dst: String,
    pub data: Vec<(&'static str, String)>,
}

impl Event {
    pub fn new(t: f64, kind: EventKind, src: impl ToString, dst: impl ToString) -> Self {
        Self { t, kind, src: src.to_string(), dst: dst.to_string(), data: Vec::new() }
    }

    pub fn with(mut self, key: &'static str, value: impl ToString) -> Self {
        self.data.push((key, value.to_string()));
        self
    }

    /// Numeric datum at fixed precision, so logs compare byte for byte.
    pub fn num(self, key: &'static str, value: f64) -> Self {
        self.with(key, format!("{value:.4}"))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.data.iter().find(|(k, _)| *k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = |s: &str| if s.is_empty() { "-".to_string() } else { s.to_string() };
        write!(f, "t={:.3} ev={} src={} dst={} data=", self.t, self.kind, id(&self.src), id(&self.dst))?;
        for (i, (k, v)) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            write!(f, "{k}:{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EventLog {
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.events {
            let _ = writeln!(s, "{e}");
        }
        s
    }
}

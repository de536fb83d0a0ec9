use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{Error, Result};
use crate::event_log::RawEvent;

use super::{Ingested, RecordError, TimestampFormat};

const NAME_KEY: &str = "concept:name";
const TIME_KEY: &str = "time:timestamp";

#[derive(Debug, PartialEq, Eq)]
enum Scope {
    Log,
    Trace,
    Event,
    Other,
}

#[derive(Default)]
struct PendingEvent {
    activity: Option<String>,
    timestamp: Option<String>,
}

#[derive(Default)]
struct Builder {
    out: Ingested,
    trace_index: usize,
    event_index: usize,
    case_id: Option<String>,
    // events of the trace being read; the case id may appear after them
    trace_events: Vec<(usize, PendingEvent)>,
    current: Option<PendingEvent>,
}

impl Builder {
    fn trace_attribute(&mut self, key: String, value: String) {
        if key == NAME_KEY {
            self.case_id = Some(value);
        }
    }

    fn event_attribute(&mut self, key: String, value: String) {
        if let Some(ev) = self.current.as_mut() {
            match key.as_str() {
                NAME_KEY => ev.activity = Some(value),
                TIME_KEY => ev.timestamp = Some(value),
                _ => {}
            }
        }
    }

    fn close(&mut self, scope: Scope) {
        match scope {
            Scope::Event => {
                if let Some(ev) = self.current.take() {
                    self.trace_events.push((self.event_index, ev));
                }
                self.event_index += 1;
            }
            Scope::Trace => {
                let case = self
                    .case_id
                    .take()
                    .filter(|c| !c.is_empty())
                    .unwrap_or_else(|| format!("#trace-{}", self.trace_index));
                for (index, ev) in self.trace_events.drain(..) {
                    finish_event(&case, index, ev, &mut self.out);
                }
                self.trace_index += 1;
            }
            _ => {}
        }
    }
}

/// Reads the `log/trace/event` skeleton of an XES document. Only
/// `concept:name` (trace and event level) and `time:timestamp` are used.
pub fn ingest_xes<R: BufRead>(reader: R) -> Result<Ingested> {
    let mut xml = Reader::from_reader(reader);
    xml.config_mut().trim_text(true);

    let mut state = Builder::default();
    let mut stack: Vec<Scope> = Vec::new();
    let mut buf = Vec::new();
    let mut saw_log = false;

    loop {
        let event = xml.read_event_into(&mut buf).map_err(|e| {
            Error::Input(format!("malformed XES at byte {}: {e}", xml.error_position()))
        })?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let scope = match e.local_name().as_ref() {
                    b"log" if stack.is_empty() => {
                        saw_log = true;
                        Scope::Log
                    }
                    b"trace" if stack.last() == Some(&Scope::Log) => {
                        state.case_id = None;
                        state.trace_events.clear();
                        Scope::Trace
                    }
                    b"event" if stack.last() == Some(&Scope::Trace) => {
                        state.current = Some(PendingEvent::default());
                        Scope::Event
                    }
                    _ => {
                        match stack.last() {
                            Some(Scope::Trace) => {
                                if let Some((k, v)) = attribute(e)? {
                                    state.trace_attribute(k, v);
                                }
                            }
                            Some(Scope::Event) => {
                                if let Some((k, v)) = attribute(e)? {
                                    state.event_attribute(k, v);
                                }
                            }
                            _ => {}
                        }
                        Scope::Other
                    }
                };
                if matches!(event, Event::Empty(_)) {
                    state.close(scope);
                } else {
                    stack.push(scope);
                }
            }
            Event::End(_) => {
                let scope = stack
                    .pop()
                    .ok_or_else(|| Error::Input("malformed XES: unbalanced end tag".into()))?;
                state.close(scope);
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !stack.is_empty() {
        return Err(Error::Input("malformed XES: unexpected end of document".into()));
    }
    if !saw_log {
        return Err(Error::Input("not an XES document: no <log> element".into()));
    }
    Ok(state.out)
}

fn finish_event(case: &str, index: usize, ev: PendingEvent, out: &mut Ingested) {
    let activity = match ev.activity.filter(|a| !a.is_empty()) {
        Some(a) => a,
        None => {
            out.errors.push(RecordError {
                index,
                message: format!("event {index} in case '{case}' has no {NAME_KEY}"),
            });
            return;
        }
    };
    let Some(raw) = ev.timestamp else {
        out.errors.push(RecordError {
            index,
            message: format!("event {index} in case '{case}' has no {TIME_KEY}"),
        });
        return;
    };
    match TimestampFormat::Iso8601.parse(&raw) {
        Some(timestamp) => out.events.push(RawEvent {
            case_id: case.to_owned(),
            activity,
            timestamp,
            source_index: index,
        }),
        None => out.errors.push(RecordError {
            index,
            message: format!("event {index} in case '{case}': unparsable timestamp '{raw}'"),
        }),
    }
}

/// `(key, value)` of an XES attribute element such as
/// `<string key=".." value=".."/>`.
fn attribute(e: &BytesStart<'_>) -> Result<Option<(String, String)>> {
    let mut key = None;
    let mut value = None;
    for attr in e.attributes() {
        let attr = attr.map_err(|err| Error::Input(format!("malformed XES attribute: {err}")))?;
        let v = attr
            .unescape_value()
            .map_err(|err| Error::Input(format!("malformed XES attribute value: {err}")))?;
        match attr.key.as_ref() {
            b"key" => key = Some(v.into_owned()),
            b"value" => value = Some(v.into_owned()),
            _ => {}
        }
    }
    Ok(key.zip(value))
}

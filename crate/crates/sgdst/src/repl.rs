//! Line-oriented session that tracks one service as turns are typed in.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use sgdst_core::corpus::{Frame, Speaker, Turn};
use sgdst_core::encoder::{Backend, Encoder};
use sgdst_core::schema::Schema;
use sgdst_core::tracker::{self, Head, LearnedModels, ModelBundle, ResetRule, TrackedTurn, TrackerMemory};

use crate::checkpoint;
use crate::cli::open_encoder;

pub const HELP: &str = "\
commands:
  :load <manifest>    load a model bundle
  :service <name>     choose the tracked service
  :history            list the turns so far
  :state              print the last tracked state
  :help               show this text
  :quit               leave
turns:
  user: <text>        add a user turn and track it
  system: <text>      add a system turn
  <text>              add a turn for whoever speaks next
";

struct Loaded {
    bundle: ModelBundle,
    encoder: Box<dyn Encoder>,
}

pub struct Session {
    schema: Schema,
    rules: Vec<ResetRule>,
    encoder_override: Option<String>,
    service: String,
    models: Option<Loaded>,
    turns: Vec<Turn>,
    memory: BTreeMap<String, TrackerMemory>,
    last: Option<TrackedTurn>,
}

fn speaker_name(s: Speaker) -> &'static str {
    match s {
        Speaker::User => "user",
        Speaker::System => "system",
    }
}

enum Flow {
    Continue,
    Quit,
}

impl Session {
    pub fn new(schema: Schema, rules: Vec<ResetRule>, encoder_override: Option<String>) -> Self {
        let service = schema.services.first().map(|s| s.name.clone()).unwrap_or_default();
        Session {
            schema,
            rules,
            encoder_override,
            service,
            models: None,
            turns: Vec::new(),
            memory: BTreeMap::new(),
            last: None,
        }
    }

    pub fn select_service(&mut self, name: &str) -> Result<(), String> {
        if self.schema.service(name).is_none() {
            let known: Vec<&str> = self.schema.services.iter().map(|s| s.name.as_str()).collect();
            return Err(format!("unknown service `{name}` (known: {})", known.join(", ")));
        }
        self.service = name.to_string();
        Ok(())
    }

    pub fn load(&mut self, manifest: &Path) -> anyhow::Result<()> {
        let mut bundle = checkpoint::load_bundle(manifest)?;
        match self.encoder_override.as_deref() {
            None => {}
            Some("baseline") => bundle.encoder.backend = Backend::Baseline,
            Some(addr) => bundle.encoder.backend = Backend::Sidecar(addr.to_string()),
        }
        let encoder = open_encoder(&bundle.encoder)?;
        LearnedModels::new(encoder.as_ref(), &bundle)?;
        self.models = Some(Loaded { bundle, encoder });
        Ok(())
    }

    /// Reads commands and turns until `:quit` or end of input.
    pub fn run(&mut self, input: impl BufRead, mut out: impl Write) -> std::io::Result<()> {
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Flow::Quit = self.step(line, &mut out)? {
                break;
            }
            out.flush()?;
        }
        out.flush()
    }

    fn step(&mut self, line: &str, out: &mut impl Write) -> std::io::Result<Flow> {
        if let Some(cmd) = line.strip_prefix(':') {
            return self.command(cmd, out);
        }
        let (speaker, text) = if let Some(t) = line.strip_prefix("user:") {
            (Speaker::User, t.trim())
        } else if let Some(t) = line.strip_prefix("system:") {
            (Speaker::System, t.trim())
        } else {
            (self.next_speaker(), line)
        };
        if self.models.is_none() {
            writeln!(out, "error: no models loaded; use :load <manifest>")?;
            return Ok(Flow::Continue);
        }
        if speaker != self.next_speaker() {
            writeln!(out, "error: expected a {} turn", speaker_name(self.next_speaker()))?;
            return Ok(Flow::Continue);
        }
        if text.is_empty() {
            writeln!(out, "error: empty utterance")?;
            return Ok(Flow::Continue);
        }
        self.turn(speaker, text, out)?;
        Ok(Flow::Continue)
    }

    fn next_speaker(&self) -> Speaker {
        if self.turns.len().is_multiple_of(2) {
            Speaker::User
        } else {
            Speaker::System
        }
    }

    fn command(&mut self, cmd: &str, out: &mut impl Write) -> std::io::Result<Flow> {
        let mut parts = cmd.splitn(2, char::is_whitespace);
        let name = parts.next().unwrap_or_default();
        let arg = parts.next().map(str::trim).filter(|a| !a.is_empty());
        match (name, arg) {
            ("quit" | "q", None) => return Ok(Flow::Quit),
            ("help", None) => write!(out, "{HELP}")?,
            ("history", None) => {
                if self.turns.is_empty() {
                    writeln!(out, "(no turns)")?;
                }
                for (i, t) in self.turns.iter().enumerate() {
                    writeln!(out, "[{i}] {}: {}", speaker_name(t.speaker), t.utterance)?;
                }
            }
            ("state", None) => match &self.last {
                Some(t) => self.print_state(t, out)?,
                None => writeln!(out, "(no state yet)")?,
            },
            ("service", Some(s)) => match self.select_service(s) {
                Ok(()) => writeln!(out, "tracking {s}")?,
                Err(e) => writeln!(out, "error: {e}")?,
            },
            ("load", Some(p)) => match self.load(Path::new(p)) {
                Ok(()) => writeln!(out, "loaded {p}")?,
                Err(e) => writeln!(out, "error: {e:#}")?,
            },
            _ => {
                writeln!(out, "error: malformed command `:{cmd}`")?;
                write!(out, "{HELP}")?;
            }
        }
        Ok(Flow::Continue)
    }

    fn turn(&mut self, speaker: Speaker, text: &str, out: &mut impl Write) -> std::io::Result<()> {
        let frame = Frame {
            service: self.service.clone(),
            state: None,
            actions: Vec::new(),
            span_annotations: Vec::new(),
            extra: Default::default(),
        };
        self.turns.push(Turn { speaker, utterance: text.to_string(), frames: vec![frame], extra: Default::default() });
        let idx = self.turns.len() - 1;
        writeln!(out, "[{idx}] {}: {text}", speaker_name(speaker))?;
        if speaker != Speaker::User {
            return Ok(());
        }
        let loaded = self.models.as_ref().expect("checked by caller");
        let service = self.schema.service(&self.service).expect("selected service exists");
        let memory = self.memory.get(&self.service).cloned().unwrap_or_default();
        let result = LearnedModels::new(loaded.encoder.as_ref(), &loaded.bundle)
            .and_then(|m| tracker::track_turn(&m, &self.turns, idx, service, &self.rules, &memory));
        match result {
            Ok((tracked, next)) => {
                self.memory.insert(self.service.clone(), next);
                self.print_state(&tracked, out)?;
                self.last = Some(tracked);
            }
            Err(e) => {
                self.turns.pop();
                writeln!(out, "error: {e}")?;
            }
        }
        Ok(())
    }

    fn print_state(&self, t: &TrackedTurn, out: &mut impl Write) -> std::io::Result<()> {
        let s = &t.state;
        writeln!(out, "state {} at turn {} (history from turn {})", s.service, t.turn_idx, t.history_start)?;
        writeln!(out, "  intent: {}", s.active_intent)?;
        let requested: Vec<&str> = s.requested_slots.iter().map(String::as_str).collect();
        writeln!(out, "  requested: {}", if requested.is_empty() { "-".into() } else { requested.join(", ") })?;
        if t.traces.is_empty() {
            writeln!(out, "  (no slot values)")?;
        }
        for tr in &t.traces {
            let value = s.slot_values.get(&tr.slot).map(String::as_str).unwrap_or("?");
            match tr.head {
                Head::Span => {
                    let at = match (tr.turn, tr.span) {
                        (Some(turn), Some((a, b))) => format!(", turn {turn} bytes {a}..{b}"),
                        _ => String::new(),
                    };
                    writeln!(out, "  {} = {value}  [span {:.3}{at}, text \"{}\"]", tr.slot, tr.score, tr.surface)?;
                }
                Head::Ranker => writeln!(out, "  {} = {value}  [ranker {:.3}]", tr.slot, tr.score)?,
            }
        }
        Ok(())
    }
}

//! Random straight-line programs using `defer`, rendered to source, plus a
//! simulator that predicts their output without the interpreter.

use proptest::collection::vec;
use proptest::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Print,
    Defer { fails: bool },
    Fail,
    Loop { n: u8 },
    Cond { taken: bool },
    Call,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeferProgram {
    pub helper: Vec<Step>,
    pub main: Vec<Step>,
}

fn step(allow_call: bool) -> BoxedStrategy<Step> {
    let mut options = vec![
        (3, Just(Step::Print).boxed()),
        (4, Just(Step::Defer { fails: false }).boxed()),
        (1, Just(Step::Defer { fails: true }).boxed()),
        (1, Just(Step::Fail).boxed()),
        (2, (0u8..4).prop_map(|n| Step::Loop { n }).boxed()),
        (2, any::<bool>().prop_map(|taken| Step::Cond { taken }).boxed()),
    ];
    if allow_call {
        options.push((2, Just(Step::Call).boxed()));
    }
    proptest::strategy::Union::new_weighted(options).boxed()
}

pub fn defer_program() -> impl Strategy<Value = DeferProgram> {
    (vec(step(false), 0..6), vec(step(true), 0..8)).prop_map(|(helper, main)| DeferProgram { helper, main })
}

/// Expected run outcome: printed lines, exit error, and every suppressed
/// error message in depth-first order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub events: Vec<String>,
    pub error: Option<String>,
    pub suppressed: Vec<String>,
}

#[derive(Debug, Clone)]
struct SimError {
    message: String,
    suppressed: Vec<SimError>,
}

impl SimError {
    fn flat(&self, out: &mut Vec<String>) {
        for s in &self.suppressed {
            out.push(s.message.clone());
            s.flat(out);
        }
    }
}

enum Thunk {
    Defer { label: String, fails: bool },
    Loop { label: String, i: u8 },
}

impl DeferProgram {
    pub fn render(&self) -> String {
        format!(
            "package dm\n\nimport go.defer._\n\nobject Main {{\n  def helper() = {{\n{}  }}\n\n  def main() = {{\n{}  }}\n}}\n",
            render_steps("h", &self.helper),
            render_steps("m", &self.main)
        )
    }

    pub fn simulate(&self) -> Outcome {
        let mut events = Vec::new();
        let result = self.run_def("m", &self.main, &mut events);
        let mut suppressed = Vec::new();
        let error = result.err().map(|e| {
            e.flat(&mut suppressed);
            e.message
        });
        Outcome { events, error, suppressed }
    }

    fn run_def(&self, tag: &str, steps: &[Step], events: &mut Vec<String>) -> Result<(), SimError> {
        let mut pending: Vec<Thunk> = Vec::new();
        let mut result = Ok(());
        for (k, s) in steps.iter().enumerate() {
            match s {
                Step::Print => events.push(format!("{tag}p{k}")),
                Step::Defer { fails } => pending.push(Thunk::Defer { label: format!("{tag}d{k}"), fails: *fails }),
                Step::Fail => {
                    result = Err(SimError { message: format!("{tag}f{k}"), suppressed: Vec::new() });
                    break;
                }
                Step::Loop { n } => {
                    for i in 0..*n {
                        pending.push(Thunk::Loop { label: format!("{tag}l{k}-"), i });
                    }
                }
                Step::Cond { taken } => {
                    if *taken {
                        pending.push(Thunk::Defer { label: format!("{tag}c{k}"), fails: false });
                    }
                }
                Step::Call => {
                    if let Err(e) = self.run_def("h", &self.helper, events) {
                        result = Err(e);
                        break;
                    }
                }
            }
        }
        for t in pending.into_iter().rev() {
            let outcome = match t {
                Thunk::Defer { label, fails } => {
                    events.push(label.clone());
                    if fails {
                        Err(SimError { message: format!("{label}!"), suppressed: Vec::new() })
                    } else {
                        Ok(())
                    }
                }
                Thunk::Loop { label, i } => {
                    events.push(format!("{label}{i}"));
                    Ok(())
                }
            };
            if let Err(e) = outcome {
                match &mut result {
                    Ok(()) => result = Err(e),
                    Err(primary) => primary.suppressed.push(e),
                }
            }
        }
        result
    }
}

fn render_steps(tag: &str, steps: &[Step]) -> String {
    let mut out = String::new();
    for (k, s) in steps.iter().enumerate() {
        let line = match s {
            Step::Print => format!("print(\"{tag}p{k}\")"),
            Step::Defer { fails: false } => format!("defer {{ print(\"{tag}d{k}\") }}"),
            Step::Defer { fails: true } => {
                format!("defer {{\n      print(\"{tag}d{k}\")\n      error(\"{tag}d{k}!\")\n    }}")
            }
            Step::Fail => format!("error(\"{tag}f{k}\")"),
            Step::Loop { n } => format!("repeat(i, {n}, defer {{ print(concat(\"{tag}l{k}-\", i)) }})"),
            Step::Cond { taken } => {
                let rhs = if *taken { 1 } else { 2 };
                format!("when(eq(1, {rhs}), defer {{ print(\"{tag}c{k}\") }})")
            }
            Step::Call => "helper()".into(),
        };
        out.push_str("    ");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

//! Interactive loop. Declarations entered so far are kept as source and
//! replayed in front of every new entry, so later entries see them and
//! labels keep their numbers from one entry to the next.

use std::io::{self, BufRead, IsTerminal, Write};

use anyhow::{anyhow, bail, Result};

use gradualhm::eval::{Mode, RunOptions, TraceMode, DEFAULT_MAX_STEPS};
use gradualhm::frontend::parse_program;

use crate::session::{self, compile_src};

pub struct Repl {
    decls: Vec<String>,
    mode: Mode,
    fuel: usize,
}

impl Default for Repl {
    fn default() -> Self {
        Repl { decls: Vec::new(), mode: Mode::Dti, fuel: DEFAULT_MAX_STEPS }
    }
}

enum Reply {
    Text(String),
    Quit,
}

impl Repl {
    pub fn new(mode: Mode, fuel: usize) -> Self {
        Repl { decls: Vec::new(), mode, fuel }
    }

    /// Session source followed by `input`, one entry per line.
    fn with(&self, input: &str) -> String {
        let mut src = String::new();
        for d in &self.decls {
            src.push_str(d);
            src.push_str(" ;;\n");
        }
        src.push_str(input);
        src
    }

    fn handle(&mut self, line: &str) -> Result<Reply> {
        let line = line.trim();
        if line.is_empty() {
            return Ok(Reply::Text(String::new()));
        }
        if let Some(rest) = line.strip_prefix(':') {
            let (cmd, arg) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let arg = arg.trim();
            return match cmd {
                "quit" | "q" => Ok(Reply::Quit),
                "type" | "t" => {
                    let (c, _) = compile_src(&self.with(arg))?;
                    Ok(Reply::Text(format!("- : {}", c.inference.ty)))
                }
                "cast" => {
                    let (c, _) = compile_src(&self.with(arg))?;
                    Ok(Reply::Text(session::show_casts(&c)))
                }
                "trace" => self.eval(arg, TraceMode::Full).map(Reply::Text),
                "set" => self.set(arg).map(|()| Reply::Text(String::new())),
                _ => bail!("unknown directive `:{cmd}`; try :type, :cast, :trace, :set or :quit"),
            };
        }
        let src = self.with(line);
        let (prog, _) = parse_program(&src).map_err(|e| anyhow!("parse error at {e}"))?;
        if prog.body.is_some() {
            return self.eval(line, TraceMode::Off).map(Reply::Text);
        }
        // new declarations: check them before keeping them
        let known = self.decls.len();
        let names: Vec<String> = prog.decls.iter().skip(known).map(|d| d.name.clone()).collect();
        let mut out = Vec::new();
        for name in &names {
            let (c, _) = compile_src(&format!("{src} ;;\n{name}"))?;
            out.push(format!("val {name} : {}", c.inference.ty));
        }
        self.decls.push(line.to_string());
        Ok(Reply::Text(out.join("\n")))
    }

    fn eval(&self, input: &str, trace: TraceMode) -> Result<String> {
        let src = self.with(input);
        let (c, notes) = compile_src(&src)?;
        let r = session::run(&c, self.mode, RunOptions { max_steps: self.fuel, trace })?;
        let mut out: Vec<String> = notes.iter().map(|n| format!("note: {}", n.message)).collect();
        if trace == TraceMode::Full {
            out.extend(r.trace.iter().enumerate().map(|(k, e)| session::render_trace_entry(k + 1, e)));
        }
        out.push(session::render_result(&c, &r, &src));
        Ok(out.join("\n"))
    }

    fn set(&mut self, arg: &str) -> Result<()> {
        let (key, value) = arg.split_once(char::is_whitespace).ok_or_else(|| anyhow!("usage: :set fuel N | :set mode dti|baseline"))?;
        match (key, value.trim()) {
            ("fuel", n) => self.fuel = n.parse().map_err(|_| anyhow!("fuel must be a number, got `{n}`"))?,
            ("mode", "dti") => self.mode = Mode::Dti,
            ("mode", "baseline") => self.mode = Mode::Baseline,
            (k, v) => bail!("cannot set {k} to `{v}`"),
        }
        Ok(())
    }

    /// Reads entries from `input` until end of file or `:quit`.
    pub fn run(&mut self, input: impl BufRead, mut out: impl Write, interactive: bool) -> io::Result<()> {
        let prompt = |out: &mut dyn Write| -> io::Result<()> {
            if interactive {
                write!(out, "# ")?;
                out.flush()?;
            }
            Ok(())
        };
        prompt(&mut out)?;
        for line in input.lines() {
            match self.handle(&line?) {
                Ok(Reply::Quit) => break,
                Ok(Reply::Text(t)) if t.is_empty() => {}
                Ok(Reply::Text(t)) => writeln!(out, "{t}")?,
                Err(e) => writeln!(out, "error: {e:#}")?,
            }
            prompt(&mut out)?;
        }
        Ok(())
    }
}

pub fn main(mode: Mode, fuel: usize) -> Result<()> {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    Repl::new(mode, fuel).run(stdin.lock(), io::stdout().lock(), interactive)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session(lines: &str) -> String {
        let mut out = Vec::new();
        Repl::default().run(lines.as_bytes(), &mut out, false).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn declarations_persist() {
        let out = session("let id = fun x -> x\nid 3\nid true\n");
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("val id : "), "{out}");
        assert_eq!(lines[1], "- : int = 3");
        assert_eq!(lines[2], "- : bool = true");
    }

    #[test]
    fn bad_declarations_are_dropped() {
        let out = session("let f = 1 + true\nf\n");
        assert!(out.lines().all(|l| l.starts_with("error:")), "{out}");
    }

    #[test]
    fn directives() {
        let out = session(":type fun (x : int) -> x\n:set fuel 5\n(fun (x : ?) -> x x) (fun (x : ?) -> x x)\n:quit\n1\n");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "- : int -> int");
        assert_eq!(lines[1], "timeout after 5 steps");
        assert_eq!(lines.len(), 2);
    }

    #[test]
    fn residual_bindings_are_shown() {
        let out = session("(fun (x : ?) -> x 2) (fun y -> y)\n");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "- : ? = 2 : int => ?");
        assert!(lines[1].starts_with("where ") && lines[1].ends_with(":= int"), "{out}");
    }
}
